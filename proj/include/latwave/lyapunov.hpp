#ifndef LATWAVE_LYAPUNOV_HPP
#define LATWAVE_LYAPUNOV_HPP

#include <cstddef>
#include <vector>

#include "latwave/profile.hpp"

namespace latwave {

// Volterra function, nonnegative, vanishing only at 1.
// Throws std::domain_error for x <= 0.
double volterra_g(double x);

// L(ical) = W + d1 S* (V1 + V2) + d2 I* (U1 + U2) with
//   W  = c S* g(S/S*) + c I* g(I/I*)
//   V1 = int_0^{sin} g(S(xi-v)/S*) dv - int_{-sin}^0 g(S(xi-v)/S*) dv
// and V2, U1, U2 the cos / I analogues. Sub-integrals by 16-point
// Gauss-Legendre on interpolated profile values. xi must be inset from the
// grid ends by 1 + max(sin, cos).
double eval_L(const ModelParams& p, double c, const Equilibria& eq,
              const ProfileGrid& grid, double xi);

// dL/dxi along the wave system, assembled from the dissipation term
//   A = (1 - S*/S)(Lambda - F - mu1 S) + (1 - I*/I)(F - mu2 I)
// evaluated directly from its definition, minus the shift-ratio g-sums with
// the d1 S* and d2 I* coefficient convention:
//   dL = A - d1 S* sum_h g(S(xi+h)/S(xi)) - d2 I* sum_h g(I(xi+h)/I(xi)),
// h in {+-sin, +-cos}. The direct A equals the split AM-GM form
//   (beta S* I*/(1+aI*)) (3 - S*/S - S(1+aI*)/(S*(1+aI)) - (1+aI)/(1+aI*))
//   - a beta S* (I-I*)^2 / ((1+aI)(1+aI*)^2) - mu1 (S-S*)^2 / S,
// every piece of which is nonpositive.
double eval_dL_analytic(const ModelParams& p, double c, const Equilibria& eq,
                        const ProfileGrid& grid, double xi);

// The dissipation term A by itself (both routes exposed for verification).
double dissipation_A(const ModelParams& p, const Equilibria& eq, double S, double I);
double dissipation_A_split(const ModelParams& p, const Equilibria& eq, double S, double I);

struct LyapunovTrace {
    std::vector<double> xs;
    std::vector<double> L;
    std::vector<double> dL_analytic;
    std::vector<double> dL_numeric;   // centered difference of L
    double max_positive_dL = 0.0;
    double min_L = 0.0;
    double max_abs_L = 0.0;
};

// Evaluates the functional at every grid node inset by 1 + max(sin, cos) + h
// (the extra h admits the centered difference).
LyapunovTrace lyapunov_trace(const ModelParams& p, double c, const Equilibria& eq,
                             const ProfileGrid& grid);

struct MonotonicityReport {
    double eps_mono = 0.0;
    double compliant_fraction = 0.0;
    double worst_violation = 0.0;     // max(dL_numeric - eps_mono, 0)
    double worst_xi = 0.0;
    std::size_t n_nodes = 0;
    bool pass = false;                // 100% compliant
};

// Fraction of nodes with dL_numeric <= eps_mono. eps_mono <= 0 selects the
// default 1e-7 * max|L|.
MonotonicityReport monotonicity_report(const LyapunovTrace& trace, double eps_mono = -1.0);

} // namespace latwave

#endif
