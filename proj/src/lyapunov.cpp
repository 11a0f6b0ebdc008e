#include "latwave/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

namespace latwave {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGL16x[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374,  0.0950125098376374,
     0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
     0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
     0.9894009349916499};
constexpr double kGL16w[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

double grid_value(const ProfileGrid& g, Field f, double xi) {
    const std::vector<double>& v = (f == Field::S) ? g.S : g.I;
    double t = (xi - g.xs.front()) / g.h;
    std::size_t n = v.size();
    std::size_t i0 = 0;
    if (t > 0.0) {
        i0 = static_cast<std::size_t>(t);
        if (i0 > n - 2) i0 = n - 2;
    }
    double fr = t - double(i0);
    if (fr < 1e-9) return v[i0];
    if (fr > 1.0 - 1e-9) return v[i0 + 1];
    return v[i0] * (1.0 - fr) + v[i0 + 1] * fr;
}

// int_a^b g(field(u)/ref) du by GL-16
double g_integral(const ProfileGrid& grid, Field f, double ref, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 16; ++i)
        acc += kGL16w[i] * volterra_g(grid_value(grid, f, mid + half * kGL16x[i]) / ref);
    return half * acc;
}

void require_inset(const ProfileGrid& g, const ModelParams& p, double xi) {
    double inset = 1.0 + std::max(std::sin(p.theta), std::cos(p.theta));
    if (xi < g.xs.front() + inset || xi > g.xs.back() - inset)
        throw std::domain_error("lyapunov: xi too close to the grid ends");
}

} // namespace

double volterra_g(double x) {
    if (!(x > 0.0)) throw std::domain_error("volterra_g: requires x > 0");
    return x - 1.0 - std::log(x);
}

double eval_L(const ModelParams& p, double c, const Equilibria& eq,
              const ProfileGrid& grid, double xi) {
    require_inset(grid, p, xi);
    const double s = std::sin(p.theta), k = std::cos(p.theta);
    double W = c * eq.S_star * volterra_g(grid_value(grid, Field::S, xi) / eq.S_star)
             + c * eq.I_star * volterra_g(grid_value(grid, Field::I, xi) / eq.I_star);
    double V1 = g_integral(grid, Field::S, eq.S_star, xi - s, xi)
              - g_integral(grid, Field::S, eq.S_star, xi, xi + s);
    double V2 = g_integral(grid, Field::S, eq.S_star, xi - k, xi)
              - g_integral(grid, Field::S, eq.S_star, xi, xi + k);
    double U1 = g_integral(grid, Field::I, eq.I_star, xi - s, xi)
              - g_integral(grid, Field::I, eq.I_star, xi, xi + s);
    double U2 = g_integral(grid, Field::I, eq.I_star, xi - k, xi)
              - g_integral(grid, Field::I, eq.I_star, xi, xi + k);
    return W + p.d1 * eq.S_star * (V1 + V2) + p.d2 * eq.I_star * (U1 + U2);
}

double dissipation_A(const ModelParams& p, const Equilibria& eq, double S, double I) {
    if (!(S > 0.0 && I > 0.0)) throw std::domain_error("dissipation_A: requires S, I > 0");
    double F = incidence(p, S, I);
    return (1.0 - eq.S_star / S) * (p.Lambda - F - p.mu1 * S)
         + (1.0 - eq.I_star / I) * (F - p.mu2 * I);
}

double dissipation_A_split(const ModelParams& p, const Equilibria& eq, double S, double I) {
    if (!(S > 0.0 && I > 0.0)) throw std::domain_error("dissipation_A_split: requires S, I > 0");
    double aIs = 1.0 + p.alpha * eq.I_star;
    double aI = 1.0 + p.alpha * I;
    double b = p.beta * eq.S_star * eq.I_star / aIs;
    double amgm = 3.0 - eq.S_star / S - S * aIs / (eq.S_star * aI) - aI / aIs;
    double sq_I = p.alpha * p.beta * eq.S_star * (I - eq.I_star) * (I - eq.I_star) / (aI * aIs * aIs);
    double sq_S = p.mu1 * (S - eq.S_star) * (S - eq.S_star) / S;
    return b * amgm - sq_I - sq_S;
}

double eval_dL_analytic(const ModelParams& p, double c, const Equilibria& eq,
                        const ProfileGrid& grid, double xi) {
    (void)c;
    require_inset(grid, p, xi);
    const double s = std::sin(p.theta), k = std::cos(p.theta);
    double S = grid_value(grid, Field::S, xi);
    double I = grid_value(grid, Field::I, xi);
    double gs = 0.0, gi = 0.0;
    for (double sh : {s, -s, k, -k}) {
        gs += volterra_g(grid_value(grid, Field::S, xi + sh) / S);
        gi += volterra_g(grid_value(grid, Field::I, xi + sh) / I);
    }
    return dissipation_A(p, eq, S, I) - p.d1 * eq.S_star * gs - p.d2 * eq.I_star * gi;
}

LyapunovTrace lyapunov_trace(const ModelParams& p, double c, const Equilibria& eq,
                             const ProfileGrid& grid) {
    LyapunovTrace tr;
    double inset = 1.0 + std::max(std::sin(p.theta), std::cos(p.theta)) + grid.h;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double xi = grid.xs[i];
        if (xi < grid.xs.front() + inset || xi > grid.xs.back() - inset) continue;
        tr.xs.push_back(xi);
        tr.L.push_back(eval_L(p, c, eq, grid, xi));
        tr.dL_analytic.push_back(eval_dL_analytic(p, c, eq, grid, xi));
    }
    tr.dL_numeric.resize(tr.L.size(), 0.0);
    for (std::size_t i = 0; i < tr.L.size(); ++i) {
        // centered where possible, one-sided at the trace ends
        if (i == 0)
            tr.dL_numeric[i] = (tr.L[1] - tr.L[0]) / grid.h;
        else if (i + 1 == tr.L.size())
            tr.dL_numeric[i] = (tr.L[i] - tr.L[i - 1]) / grid.h;
        else
            tr.dL_numeric[i] = (tr.L[i + 1] - tr.L[i - 1]) / (2.0 * grid.h);
    }
    tr.min_L = tr.L.empty() ? 0.0 : tr.L[0];
    for (double v : tr.L) {
        tr.min_L = std::min(tr.min_L, v);
        tr.max_abs_L = std::max(tr.max_abs_L, std::fabs(v));
    }
    for (double v : tr.dL_numeric)
        tr.max_positive_dL = std::max(tr.max_positive_dL, v);
    return tr;
}

MonotonicityReport monotonicity_report(const LyapunovTrace& tr, double eps_mono) {
    MonotonicityReport rep;
    // the 1e-14 floor keeps rounding dust on an exactly-constant trace from
    // registering as violations
    rep.eps_mono = eps_mono > 0.0 ? eps_mono : 1e-7 * tr.max_abs_L + 1e-14;
    rep.n_nodes = tr.xs.size();
    if (rep.n_nodes == 0) return rep;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < tr.xs.size(); ++i) {
        double v = tr.dL_numeric[i];
        if (v <= rep.eps_mono) {
            ++ok;
        } else if (v - rep.eps_mono > rep.worst_violation) {
            rep.worst_violation = v - rep.eps_mono;
            rep.worst_xi = tr.xs[i];
        }
    }
    rep.compliant_fraction = double(ok) / double(rep.n_nodes);
    rep.pass = ok == rep.n_nodes;
    return rep;
}

} // namespace latwave
