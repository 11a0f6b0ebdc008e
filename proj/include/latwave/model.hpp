#ifndef LATWAVE_MODEL_HPP
#define LATWAVE_MODEL_HPP

#include <string>

namespace latwave {

// Parameters of the 2-D lattice SIR model and the propagation direction.
struct ModelParams {
    double d1 = 1.0;      // diffusion rate of S
    double d2 = 1.0;      // diffusion rate of I
    double d3 = 1.0;      // diffusion rate of R
    double Lambda = 1.0;  // recruitment rate
    double beta = 2.0;    // transmission coefficient
    double alpha = 1.0;   // saturation constant
    double mu1 = 1.0;     // mortality of S (and R)
    double mu2 = 1.0;     // removal rate of I
    double gamma = 0.5;   // recovery rate
    double theta = 0.0;   // propagation direction, radians
};

struct Equilibria {
    double S0 = 0.0;      // disease-free susceptible level, Lambda/mu1
    double R0 = 0.0;      // basic reproduction number, beta*S0/mu2
    double S_star = 0.0;  // endemic susceptible level (valid iff R0 > 1)
    double I_star = 0.0;  // endemic infected level (valid iff R0 > 1)
    bool endemic = false;
    // back-substitution residuals of the two steady-state equations
    double residual_S = 0.0;
    double residual_I = 0.0;
};

// Validates positivity/finiteness; with profile_mode also requires
// sin(theta) > 0 and cos(theta) > 0 (open first quadrant).
// Throws std::invalid_argument naming the offending field.
ModelParams validate_params(const ModelParams& raw, bool profile_mode = false);

double disease_free_equilibrium(const ModelParams& p);
double basic_reproduction(const ModelParams& p);

// Unique positive steady state; throws std::domain_error when R0 <= 1.
// I* = (Lambda*beta - mu1*mu2) / (mu2*(beta + mu1*alpha)),
// S* = mu2*(1 + alpha*I*) / beta, both certified by back-substitution.
void endemic_equilibrium(const ModelParams& p, double& S_star, double& I_star);

// All of the above bundled, residual-certified.
Equilibria equilibria(const ModelParams& p);

// saturated incidence beta*S*I/(1 + alpha*I)
inline double incidence(const ModelParams& p, double S, double I) {
    return p.beta * S * I / (1.0 + p.alpha * I);
}

} // namespace latwave

#endif
