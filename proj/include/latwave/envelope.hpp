#ifndef LATWAVE_ENVELOPE_HPP
#define LATWAVE_ENVELOPE_HPP

#include <cstddef>
#include <vector>

#include "latwave/dispersion.hpp"
#include "latwave/model.hpp"

namespace latwave {

// Constants of the four envelope functions
//   S+(xi) = S0
//   I+(xi) = min(e^{lambda1 xi}, I0)
//   S-(xi) = max(S0 (1 - M1 e^{eps1 xi}), 0)
//   I-(xi) = max(e^{lambda1 xi} (1 - M2 e^{eps2 xi}), 0)
struct EnvelopeParams {
    double I0 = 0.0;
    double M1 = 0.0, M2 = 0.0;
    double eps1 = 0.0, eps2 = 0.0;
    double knot1 = 0.0;   // (1/eps1) ln(1/M1), where S- reaches 0
    double knot2 = 0.0;   // (1/eps2) ln(1/M2), where I- reaches 0
    double lambda1 = 0.0; // carried from dispersion
};

// Auto-selects (I0, eps1, M1, eps2, M2) so that all four differential
// inequalities hold with the exact nonlinear residuals:
//   I0   = (beta*S0 - mu2)/(alpha*mu2)
//   eps1 = largest of lambda1/2, 1/2, 1/4, ... with
//          d1*(e^{e s}+e^{-e s}+e^{e k}+e^{-e k}-4) - mu1 - c*e < 0
//   M1   = max(2, -beta / that-negative-quantity)
//   eps2 = largest of min(lambda1/2, eps1) halved until Delta_c(lambda1+eps2) < 0
//   M2   = max(2, 2*(beta*S0*M1 + alpha*beta*S0) / (-Delta_c(lambda1+eps2)))
// The M2 numerator carries the beta*(S0 - S-)I- slack term in addition to
// the alpha*beta*S0*I-^2 one; dropping it breaks inequality (d).
EnvelopeParams select_envelope(const ModelParams& p, double c, const RootPair& roots);

double upper_S(const EnvelopeParams& env, const Equilibria& eq, double xi);
double upper_I(const EnvelopeParams& env, const Equilibria& eq, double xi);
double lower_S(const EnvelopeParams& env, const Equilibria& eq, double xi);
double lower_I(const EnvelopeParams& env, const Equilibria& eq, double xi);

// one-sided analytic derivatives (exact away from the kinks)
double upper_S_deriv(const EnvelopeParams& env, const Equilibria& eq, double xi);
double upper_I_deriv(const EnvelopeParams& env, const Equilibria& eq, double xi);
double lower_S_deriv(const EnvelopeParams& env, const Equilibria& eq, double xi);
double lower_I_deriv(const EnvelopeParams& env, const Equilibria& eq, double xi);

struct InequalityStats {
    double min_residual = 0.0;
    double max_residual = 0.0;
    std::size_t violations = 0;
    double worst_xi = 0.0;     // location of the worst-signed residual
    double worst_value = 0.0;
};

// Residual certificates of the four differential inequalities:
//   (a) c S+' - d1 J[S+] - Lambda + beta S+ I-/(1+alpha I-) + mu1 S+ >= 0
//   (b) c I+' - d2 J[I+] - beta S+ I+/(1+alpha I+) + mu2 I+        >= 0
//   (c) c S-' - d1 J[S-] - Lambda + beta S- I+/(1+alpha I+) + mu1 S- <= 0
//   (d) c I-' - d2 J[I-] - beta S- I-/(1+alpha I-) + mu2 I-        <= 0
struct CertificateReport {
    InequalityStats a, b, c, d;
    std::size_t points_checked = 0;
    double tolerance = 0.0;   // numerical noise floor, 1e-12*max(1, beta*S0)
    bool pass = false;
    std::vector<double> violating_xi;  // capped at 64 entries
};

// Sweeps a uniform grid of n points over [-halfwidth, halfwidth], skipping
// a one-grid-step guard band around each kink (knot1, knot2, ln(I0)/lambda1).
CertificateReport verify_upper_lower(const ModelParams& p, double c,
                                     const EnvelopeParams& env,
                                     double halfwidth, std::size_t n);

// Per-point residuals of the four inequalities (used by the CSV emitter).
void envelope_residuals(const ModelParams& p, double c, const EnvelopeParams& env,
                        double xi, double& ra, double& rb, double& rc, double& rd);

} // namespace latwave

#endif
