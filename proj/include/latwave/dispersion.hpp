#ifndef LATWAVE_DISPERSION_HPP
#define LATWAVE_DISPERSION_HPP

#include "latwave/model.hpp"

namespace latwave {

// Critical wave speed c* and decay rate lambda*: the unique point where
// Delta_c has a double root (minimum touching zero).
struct CriticalPair {
    double c_star = 0.0;
    double lambda_star = 0.0;
    double min_value = 0.0;  // Delta_{c*}(lambda*), certificate
    double dlambda_value = 0.0;  // dDelta/dlambda at (lambda*, c*), certificate
};

// The two positive roots of Delta_c for c > c*.
struct RootPair {
    double lambda1 = 0.0;  // smaller root, 0 < lambda1 < lambda*
    double lambda2 = 0.0;  // larger root, lambda2 > lambda*
};

enum class SpeedClass { subcritical, critical, supercritical };

// Characteristic function of the linearized I equation:
//   Delta_c(lambda) = d2 [e^{l s} + e^{-l s} + e^{l k} + e^{-l k} - 4]
//                     - c*lambda + beta*S0 - mu2,
// s = sin(theta), k = cos(theta). Throws std::range_error when
// |lambda|*max(s,k) exceeds 700 (exp overflow guard).
double delta(const ModelParams& p, double c, double lambda);

// Analytic d/dlambda of delta. The constant -4 term has zero derivative,
// so only the four exponentials survive.
double delta_dlambda(const ModelParams& p, double c, double lambda);

// Second derivative, strictly positive for d2 > 0.
double delta_d2lambda(const ModelParams& p, double c, double lambda);

// Location of the interior minimum of Delta_c (unique for c > 0, d2 > 0).
double delta_argmin(const ModelParams& p, double c);

// min over lambda > 0 of Delta_c.
double delta_min(const ModelParams& p, double c);

// Requires R0 > 1 and d2 > 0. Bisection on c over an auto-expanded
// bracket, inner minimum by safeguarded Newton on delta_dlambda,
// then Newton polish on c (dm/dc = -lambda_min). Certified so that
// |Delta| and |dDelta/dlambda| at (lambda*, c*) are < 1e-9*max(1, beta*S0).
CriticalPair find_critical(const ModelParams& p);

// Requires R0 > 1 and c > c*. Brackets [0, lambda*] and [lambda*, up].
RootPair find_roots(const ModelParams& p, double c);
RootPair find_roots(const ModelParams& p, double c, const CriticalPair& crit);

// Sign of min_lambda Delta_c with a 1e-9-scaled tolerance band for "critical".
SpeedClass classify_speed(const ModelParams& p, double c);

const char* to_string(SpeedClass s);

// tolerance scale used by all dispersion certificates
inline double delta_scale(const ModelParams& p) {
    double bS0 = p.beta * p.Lambda / p.mu1;
    return bS0 > 1.0 ? bS0 : 1.0;
}

} // namespace latwave

#endif
