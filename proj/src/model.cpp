#include "latwave/model.hpp"

#include <cmath>
#include <stdexcept>

namespace latwave {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("ModelParams: " + msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

ModelParams validate_params(const ModelParams& raw, bool profile_mode) {
    const ModelParams& p = raw;
    require(finite(p.d1) && finite(p.d2) && finite(p.d3) && finite(p.Lambda) &&
                finite(p.beta) && finite(p.alpha) && finite(p.mu1) &&
                finite(p.mu2) && finite(p.gamma) && finite(p.theta),
            "non-finite value");
    require(p.d1 >= 0.0, "d1 must be >= 0");
    require(p.d2 >= 0.0, "d2 must be >= 0");
    require(p.d3 >= 0.0, "d3 must be >= 0");
    require(p.Lambda > 0.0, "Lambda must be > 0");
    require(p.beta > 0.0, "beta must be > 0");
    require(p.alpha > 0.0, "alpha must be > 0");
    require(p.mu1 > 0.0, "mu1 must be > 0");
    require(p.mu2 > 0.0, "mu2 must be > 0");
    require(p.gamma >= 0.0, "gamma must be >= 0");
    if (profile_mode) {
        require(std::sin(p.theta) > 0.0 && std::cos(p.theta) > 0.0,
                "theta must lie in the open first quadrant for profile mode");
    }
    return p;
}

double disease_free_equilibrium(const ModelParams& p) {
    return p.Lambda / p.mu1;
}

double basic_reproduction(const ModelParams& p) {
    return p.beta * disease_free_equilibrium(p) / p.mu2;
}

void endemic_equilibrium(const ModelParams& p, double& S_star, double& I_star) {
    if (basic_reproduction(p) <= 1.0)
        throw std::domain_error("no endemic equilibrium: R0 <= 1");
    I_star = (p.Lambda * p.beta - p.mu1 * p.mu2) / (p.mu2 * (p.beta + p.mu1 * p.alpha));
    S_star = p.mu2 * (1.0 + p.alpha * I_star) / p.beta;
}

Equilibria equilibria(const ModelParams& p) {
    Equilibria eq;
    eq.S0 = disease_free_equilibrium(p);
    eq.R0 = basic_reproduction(p);
    if (eq.R0 > 1.0) {
        endemic_equilibrium(p, eq.S_star, eq.I_star);
        eq.endemic = true;
        eq.residual_S = p.Lambda - incidence(p, eq.S_star, eq.I_star) - p.mu1 * eq.S_star;
        eq.residual_I = incidence(p, eq.S_star, eq.I_star) - p.mu2 * eq.I_star;
    }
    return eq;
}

} // namespace latwave
