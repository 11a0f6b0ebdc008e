#include "latwave/envelope.hpp"

#include <cmath>
#include <stdexcept>

#include "latwave/parallel.hpp"

namespace latwave {

namespace {

// Decay-rate margin of the S lower solution; tends to -mu1 as eps -> 0,
// so a small enough eps always qualifies.
double lower_S_margin(const ModelParams& p, double c, double eps) {
    double s = std::sin(p.theta), k = std::cos(p.theta);
    double shifts = 2.0 * (std::cosh(eps * s) + std::cosh(eps * k)) - 4.0;
    return p.d1 * shifts - p.mu1 - c * eps;
}

} // namespace

EnvelopeParams select_envelope(const ModelParams& p, double c, const RootPair& roots) {
    validate_params(p, true);
    Equilibria eq = equilibria(p);
    if (!eq.endemic) throw std::domain_error("select_envelope: R0 <= 1");

    EnvelopeParams env;
    env.lambda1 = roots.lambda1;
    env.I0 = (p.beta * eq.S0 - p.mu2) / (p.alpha * p.mu2);

    env.eps1 = roots.lambda1 / 2.0;
    int n = 0;
    while (!(lower_S_margin(p, c, env.eps1) < 0.0)) {
        env.eps1 /= 2.0;
        if (++n > 200) throw std::runtime_error("select_envelope: eps1 search failed");
    }
    env.M1 = std::max(2.0, -p.beta / lower_S_margin(p, c, env.eps1));

    // eps2 <= eps1 keeps the (S0 - S-) slack term integrable as xi -> -inf
    env.eps2 = std::min(roots.lambda1 / 2.0, env.eps1);
    n = 0;
    while (!(delta(p, c, roots.lambda1 + env.eps2) < 0.0)) {
        env.eps2 /= 2.0;
        if (++n > 200) throw std::runtime_error("select_envelope: eps2 search failed");
    }
    double neg = -delta(p, c, roots.lambda1 + env.eps2);
    env.M2 = std::max(2.0, 2.0 * (p.beta * eq.S0 * env.M1 + p.alpha * p.beta * eq.S0) / neg);

    env.knot1 = std::log(1.0 / env.M1) / env.eps1;
    env.knot2 = std::log(1.0 / env.M2) / env.eps2;
    return env;
}

double upper_S(const EnvelopeParams&, const Equilibria& eq, double) {
    return eq.S0;
}

double upper_I(const EnvelopeParams& env, const Equilibria&, double xi) {
    return std::min(std::exp(env.lambda1 * xi), env.I0);
}

double lower_S(const EnvelopeParams& env, const Equilibria& eq, double xi) {
    return std::max(eq.S0 * (1.0 - env.M1 * std::exp(env.eps1 * xi)), 0.0);
}

double lower_I(const EnvelopeParams& env, const Equilibria&, double xi) {
    return std::max(std::exp(env.lambda1 * xi) * (1.0 - env.M2 * std::exp(env.eps2 * xi)), 0.0);
}

double upper_S_deriv(const EnvelopeParams&, const Equilibria&, double) {
    return 0.0;
}

double upper_I_deriv(const EnvelopeParams& env, const Equilibria&, double xi) {
    if (xi < std::log(env.I0) / env.lambda1)
        return env.lambda1 * std::exp(env.lambda1 * xi);
    return 0.0;
}

double lower_S_deriv(const EnvelopeParams& env, const Equilibria& eq, double xi) {
    if (xi < env.knot1)
        return -eq.S0 * env.M1 * env.eps1 * std::exp(env.eps1 * xi);
    return 0.0;
}

double lower_I_deriv(const EnvelopeParams& env, const Equilibria&, double xi) {
    if (xi < env.knot2)
        return env.lambda1 * std::exp(env.lambda1 * xi)
             - env.M2 * (env.lambda1 + env.eps2) * std::exp((env.lambda1 + env.eps2) * xi);
    return 0.0;
}

namespace {

template <class F>
double shift_laplacian(F&& f, double xi, double s, double k) {
    return f(xi + s) + f(xi - s) + f(xi + k) + f(xi - k) - 4.0 * f(xi);
}

} // namespace

void envelope_residuals(const ModelParams& p, double c, const EnvelopeParams& env,
                        double xi, double& ra, double& rb, double& rc, double& rd) {
    Equilibria eq = equilibria(p);
    double s = std::sin(p.theta), k = std::cos(p.theta);
    auto Sp = [&](double x) { return upper_S(env, eq, x); };
    auto Ip = [&](double x) { return upper_I(env, eq, x); };
    auto Sm = [&](double x) { return lower_S(env, eq, x); };
    auto Im = [&](double x) { return lower_I(env, eq, x); };

    ra = c * upper_S_deriv(env, eq, xi) - p.d1 * shift_laplacian(Sp, xi, s, k)
       - p.Lambda + incidence(p, Sp(xi), Im(xi)) + p.mu1 * Sp(xi);
    rb = c * upper_I_deriv(env, eq, xi) - p.d2 * shift_laplacian(Ip, xi, s, k)
       - incidence(p, Sp(xi), Ip(xi)) + p.mu2 * Ip(xi);
    rc = c * lower_S_deriv(env, eq, xi) - p.d1 * shift_laplacian(Sm, xi, s, k)
       - p.Lambda + incidence(p, Sm(xi), Ip(xi)) + p.mu1 * Sm(xi);
    rd = c * lower_I_deriv(env, eq, xi) - p.d2 * shift_laplacian(Im, xi, s, k)
       - incidence(p, Sm(xi), Im(xi)) + p.mu2 * Im(xi);
}

CertificateReport verify_upper_lower(const ModelParams& p, double c,
                                     const EnvelopeParams& env,
                                     double halfwidth, std::size_t n) {
    if (n < 2) throw std::invalid_argument("verify_upper_lower: n < 2");
    CertificateReport rep;
    rep.tolerance = 1e-12 * delta_scale(p);
    double h = 2.0 * halfwidth / double(n - 1);
    double kink3 = std::log(env.I0) / env.lambda1;

    struct Acc {
        InequalityStats a, b, c, d;
        std::size_t checked = 0;
        std::vector<double> viol;
        bool first = true;
    };

    auto update = [&](InequalityStats& st, double r, double xi, bool want_nonneg,
                      Acc& acc, bool first) {
        if (first) {
            st.min_residual = st.max_residual = r;
            st.worst_xi = xi;
            st.worst_value = r;
        } else {
            if (r < st.min_residual) st.min_residual = r;
            if (r > st.max_residual) st.max_residual = r;
            bool worse = want_nonneg ? (r < st.worst_value) : (r > st.worst_value);
            if (worse) { st.worst_value = r; st.worst_xi = xi; }
        }
        bool viol = want_nonneg ? (r < -rep.tolerance) : (r > rep.tolerance);
        if (viol) {
            ++st.violations;
            if (acc.viol.size() < 64) acc.viol.push_back(xi);
        }
    };

    std::vector<Acc> accs = parallel_reduce<Acc>(n, [&](std::size_t i, Acc& acc) {
        double xi = -halfwidth + h * double(i);
        if (std::fabs(xi - env.knot1) <= h || std::fabs(xi - env.knot2) <= h ||
            std::fabs(xi - kink3) <= h)
            return;  // guard band around the kinks
        double ra, rb, rc, rd;
        envelope_residuals(p, c, env, xi, ra, rb, rc, rd);
        update(acc.a, ra, xi, true, acc, acc.first);
        update(acc.b, rb, xi, true, acc, acc.first);
        update(acc.c, rc, xi, false, acc, acc.first);
        update(acc.d, rd, xi, false, acc, acc.first);
        acc.first = false;
        ++acc.checked;
    });

    auto merge = [](InequalityStats& into, const InequalityStats& from, bool want_nonneg,
                    bool into_empty) {
        if (into_empty) { into = from; return; }
        into.min_residual = std::min(into.min_residual, from.min_residual);
        into.max_residual = std::max(into.max_residual, from.max_residual);
        into.violations += from.violations;
        bool worse = want_nonneg ? (from.worst_value < into.worst_value)
                                 : (from.worst_value > into.worst_value);
        if (worse) { into.worst_value = from.worst_value; into.worst_xi = from.worst_xi; }
    };

    bool empty = true;
    for (const Acc& acc : accs) {
        if (acc.checked == 0) continue;
        merge(rep.a, acc.a, true, empty);
        merge(rep.b, acc.b, true, empty);
        merge(rep.c, acc.c, false, empty);
        merge(rep.d, acc.d, false, empty);
        empty = false;
        rep.points_checked += acc.checked;
        for (double xi : acc.viol)
            if (rep.violating_xi.size() < 64) rep.violating_xi.push_back(xi);
    }
    rep.pass = rep.a.violations == 0 && rep.b.violations == 0 &&
               rep.c.violations == 0 && rep.d.violations == 0 && rep.points_checked > 0;
    return rep;
}

} // namespace latwave
