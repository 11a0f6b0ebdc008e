#include "latwave/dispersion.hpp"

#include <cmath>
#include <stdexcept>

namespace latwave {

namespace {

constexpr double kExpCap = 700.0;     // exp() overflows just past 709
constexpr int kMaxDoublings = 200;

struct Trig {
    double s, k;
};

Trig trig(const ModelParams& p) {
    return {std::sin(p.theta), std::cos(p.theta)};
}

void guard_exponent(double lambda, const Trig& t) {
    double m = std::fabs(lambda) * std::max(std::fabs(t.s), std::fabs(t.k));
    if (m > kExpCap)
        throw std::range_error("delta: |lambda|*max(sin,cos) exceeds exp range");
}

double beta_S0_minus_mu2(const ModelParams& p) {
    return p.beta * (p.Lambda / p.mu1) - p.mu2;
}

} // namespace

double delta(const ModelParams& p, double c, double lambda) {
    Trig t = trig(p);
    guard_exponent(lambda, t);
    // cosh form keeps the evaluation symmetric and avoids overflow of one
    // factor before the pair is summed
    double shifts = 2.0 * (std::cosh(lambda * t.s) + std::cosh(lambda * t.k)) - 4.0;
    return p.d2 * shifts - c * lambda + beta_S0_minus_mu2(p);
}

double delta_dlambda(const ModelParams& p, double c, double lambda) {
    Trig t = trig(p);
    guard_exponent(lambda, t);
    return p.d2 * 2.0 * (t.s * std::sinh(lambda * t.s) + t.k * std::sinh(lambda * t.k)) - c;
}

double delta_d2lambda(const ModelParams& p, double c, double lambda) {
    (void)c;
    Trig t = trig(p);
    guard_exponent(lambda, t);
    return p.d2 * 2.0 * (t.s * t.s * std::cosh(lambda * t.s) + t.k * t.k * std::cosh(lambda * t.k));
}

double delta_argmin(const ModelParams& p, double c) {
    if (p.d2 <= 0.0)
        throw std::invalid_argument("delta_argmin: requires d2 > 0");
    if (c <= 0.0) return 0.0;  // slope is positive for all lambda > 0 at c = 0
    // dDelta/dlambda is strictly increasing with value -c at lambda = 0;
    // bracket the sign change, then safeguarded Newton.
    double lo = 0.0, hi = 1.0;
    int n = 0;
    while (delta_dlambda(p, c, hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++n > kMaxDoublings)
            throw std::runtime_error("delta_argmin: bracket expansion failed");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        double f = delta_dlambda(p, c, x);
        double fp = delta_d2lambda(p, c, x);
        if (f > 0.0) hi = x; else lo = x;
        double step = f / fp;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-15 * (1.0 + std::fabs(x))) { x = xn; break; }
        x = xn;
    }
    return x;
}

double delta_min(const ModelParams& p, double c) {
    return delta(p, c, delta_argmin(p, c));
}

CriticalPair find_critical(const ModelParams& p) {
    if (basic_reproduction(p) <= 1.0)
        throw std::domain_error("find_critical: R0 <= 1");
    if (p.d2 <= 0.0)
        throw std::invalid_argument("find_critical: requires d2 > 0");

    // m(c) = min_lambda Delta_c is strictly decreasing (dm/dc = -lambda_min),
    // positive as c->0 and negative for large c.
    double c_lo = 0.0, c_hi = 1.0;
    int n = 0;
    while (delta_min(p, c_hi) > 0.0) {
        c_lo = c_hi;
        c_hi *= 2.0;
        if (++n > kMaxDoublings)
            throw std::runtime_error("find_critical: c-bracket expansion failed (pathological parameters)");
    }
    double c = 0.5 * (c_lo + c_hi);
    for (int it = 0; it < 200; ++it) {
        double lam = delta_argmin(p, c);
        double m = delta(p, c, lam);
        if (m > 0.0) c_lo = c; else c_hi = c;
        // Newton on m(c): m'(c) = -lambda_min(c)
        double cn = (lam > 0.0) ? c + m / lam : 0.5 * (c_lo + c_hi);
        if (!(cn > c_lo && cn < c_hi)) cn = 0.5 * (c_lo + c_hi);
        if (std::fabs(cn - c) < 1e-16 * (1.0 + c)) { c = cn; break; }
        c = cn;
    }

    CriticalPair out;
    out.c_star = c;
    out.lambda_star = delta_argmin(p, c);
    out.min_value = delta(p, c, out.lambda_star);
    out.dlambda_value = delta_dlambda(p, c, out.lambda_star);
    double tol = 1e-9 * delta_scale(p);
    if (std::fabs(out.min_value) > tol || std::fabs(out.dlambda_value) > tol)
        throw std::runtime_error("find_critical: certificate failed");
    return out;
}

namespace {

// bisection + Newton polish for a root of Delta_c on [lo, hi],
// f(lo) and f(hi) of opposite sign
double root_in(const ModelParams& p, double c, double lo, double hi) {
    double flo = delta(p, c, lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = delta(p, c, x);
        if ((f > 0.0) == (flo > 0.0)) lo = x; else hi = x;
        double fp = delta_dlambda(p, c, x);
        double xn = (fp != 0.0) ? x - f / fp : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-16 * (1.0 + std::fabs(x))) { x = xn; break; }
        x = xn;
    }
    return x;
}

} // namespace

RootPair find_roots(const ModelParams& p, double c, const CriticalPair& crit) {
    if (c <= crit.c_star)
        throw std::domain_error("find_roots: subcritical speed (c <= c*)");
    double lam_min = delta_argmin(p, c);
    if (delta(p, c, lam_min) >= 0.0)
        throw std::domain_error("find_roots: subcritical speed (min Delta >= 0)");

    RootPair out;
    out.lambda1 = root_in(p, c, 0.0, lam_min);  // Delta(0) = beta*S0 - mu2 > 0
    double hi = lam_min * 2.0;
    int n = 0;
    while (delta(p, c, hi) < 0.0) {
        hi *= 2.0;
        if (++n > kMaxDoublings)
            throw std::runtime_error("find_roots: upper bracket expansion failed");
    }
    out.lambda2 = root_in(p, c, lam_min, hi);

    double tol = 1e-9 * delta_scale(p);
    if (std::fabs(delta(p, c, out.lambda1)) > tol || std::fabs(delta(p, c, out.lambda2)) > tol)
        throw std::runtime_error("find_roots: certificate failed");
    return out;
}

RootPair find_roots(const ModelParams& p, double c) {
    return find_roots(p, c, find_critical(p));
}

SpeedClass classify_speed(const ModelParams& p, double c) {
    if (basic_reproduction(p) <= 1.0)
        throw std::domain_error("classify_speed: R0 <= 1");
    if (c <= 0.0)
        throw std::domain_error("classify_speed: c must be > 0");
    double m = delta_min(p, c);
    double tol = 1e-9 * delta_scale(p);
    if (std::fabs(m) <= tol) return SpeedClass::critical;
    return m > 0.0 ? SpeedClass::subcritical : SpeedClass::supercritical;
}

const char* to_string(SpeedClass s) {
    switch (s) {
        case SpeedClass::subcritical: return "subcritical";
        case SpeedClass::critical: return "critical";
        case SpeedClass::supercritical: return "supercritical";
    }
    return "?";
}

} // namespace latwave
