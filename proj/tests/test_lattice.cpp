#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "latwave/lattice.hpp"
#include "test_helpers.hpp"

using namespace latwave;
using namespace latwave::testing;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.Ni = c.Nj = 64;
    c.dt = 0.05;
    c.t_end = 5.0;
    c.seed_fraction = 0.05;
    return c;
}

} // namespace

TEST_CASE("init_lattice: seed geometry") {
    ModelParams p = standard_params();
    SimConfig cfg;
    cfg.Ni = cfg.Nj = 200;
    cfg.seed_fraction = 0.01;

    SUBCASE("half-plane seed fraction matches the configured fraction") {
        LatticeState st = init_lattice(p, cfg);
        std::size_t infected = 0;
        for (double v : st.I)
            if (v > 0.0) ++infected;
        double frac = double(infected) / double(st.I.size());
        CHECK(std::fabs(frac - 0.01) < 0.005);
        Equilibria eq = equilibria(p);
        for (double v : st.I)
            if (v > 0.0) CHECK(v == eq.I_star);  // default init level
        for (double v : st.S) CHECK(v == eq.S0);
        for (double v : st.R) CHECK(v == 0.0);
    }

    SUBCASE("disk seed") {
        cfg.init_shape = InitShape::disk;
        cfg.seed_fraction = 0.02;
        LatticeState st = init_lattice(p, cfg);
        std::size_t infected = 0;
        for (double v : st.I)
            if (v > 0.0) ++infected;
        CHECK(std::fabs(double(infected) / double(st.I.size()) - 0.02) < 0.005);
    }

    SUBCASE("empty seed set errors") {
        cfg.init_shape = InitShape::disk;
        cfg.Ni = cfg.Nj = 12;
        cfg.seed_fraction = 1e-4;  // radius below one site
        CHECK_THROWS_AS(init_lattice(p, cfg), std::invalid_argument);
    }
}

TEST_CASE("step: exponential relaxation of S with I = 0") {
    ModelParams p = standard_params();
    LatticeState st;
    st.Ni = st.Nj = 8;
    st.S.assign(64, 2.0);  // uniform, so diffusion drops out
    st.I.assign(64, 0.0);
    st.R.assign(64, 0.0);
    double dt = 1e-3;
    for (int n = 0; n < 1000; ++n) step(p, st, dt);
    double S0 = p.Lambda / p.mu1;
    double expect = S0 + (2.0 - S0) * std::exp(-p.mu1 * 1.0);
    for (double v : st.S) CHECK(std::fabs(v - expect) < 1e-6);
    for (double v : st.I) CHECK(v == 0.0);
}

TEST_CASE("step: uniform endemic state is stationary to 1e-10 per unit time") {
    ModelParams p = standard_params();
    Equilibria eq = equilibria(p);
    LatticeState st;
    st.Ni = st.Nj = 16;
    st.S.assign(256, eq.S_star);
    st.I.assign(256, eq.I_star);
    st.R.assign(256, p.gamma * eq.I_star / p.mu1);
    double dt = 0.01;
    for (int n = 0; n < 100; ++n) step(p, st, dt);
    for (double v : st.S) CHECK(std::fabs(v - eq.S_star) < 1e-10);
    for (double v : st.I) CHECK(std::fabs(v - eq.I_star) < 1e-10);
    for (double v : st.R) CHECK(std::fabs(v - p.gamma * eq.I_star / p.mu1) < 1e-10);
}

TEST_CASE("step: single-site perturbation stays nonnegative") {
    ModelParams p = standard_params();
    LatticeState st;
    st.Ni = st.Nj = 16;
    st.S.assign(256, 1.0);
    st.I.assign(256, 0.0);
    st.R.assign(256, 0.0);
    st.I[8 * 16 + 8] = 0.5;
    for (int n = 0; n < 200; ++n) step(p, st, 0.02);
    for (double v : st.S) CHECK(v >= 0.0);
    for (double v : st.I) CHECK(v >= 0.0);
    for (double v : st.R) CHECK(v >= 0.0);
}

TEST_CASE("zero diffusion: every site follows the scalar system") {
    ModelParams p = standard_params();
    p.d1 = p.d2 = p.d3 = 0.0;
    SimConfig cfg = small_config();
    cfg.Ni = cfg.Nj = 16;
    LatticeState st = init_lattice(p, cfg);
    LatticeState init = st;
    double dt = 0.01;
    for (int n = 0; n < 100; ++n) step(p, st, dt);

    // scalar RK4 oracle
    auto f = [&](double S, double I, double R, double& dS, double& dI, double& dR) {
        double F = p.beta * S * I / (1.0 + p.alpha * I);
        dS = p.Lambda - F - p.mu1 * S;
        dI = F - p.mu2 * I;
        dR = p.gamma * I - p.mu1 * R;
    };
    for (std::size_t q = 0; q < st.S.size(); ++q) {
        double S = init.S[q], I = init.I[q], R = init.R[q];
        for (int n = 0; n < 100; ++n) {
            double k1S, k1I, k1R, k2S, k2I, k2R, k3S, k3I, k3R, k4S, k4I, k4R;
            f(S, I, R, k1S, k1I, k1R);
            f(S + 0.5 * dt * k1S, I + 0.5 * dt * k1I, R + 0.5 * dt * k1R, k2S, k2I, k2R);
            f(S + 0.5 * dt * k2S, I + 0.5 * dt * k2I, R + 0.5 * dt * k2R, k3S, k3I, k3R);
            f(S + dt * k3S, I + dt * k3I, R + dt * k3R, k4S, k4I, k4R);
            S += dt / 6.0 * (k1S + 2 * k2S + 2 * k3S + k4S);
            I += dt / 6.0 * (k1I + 2 * k2I + 2 * k3I + k4I);
            R += dt / 6.0 * (k1R + 2 * k2R + 2 * k3R + k4R);
        }
        CHECK(std::fabs(st.S[q] - S) < 1e-8);
        CHECK(std::fabs(st.I[q] - I) < 1e-8);
        CHECK(std::fabs(st.R[q] - R) < 1e-8);
    }
}

TEST_CASE("RK4 order: halving dt gains a factor of about 16 against a dt/8 reference") {
    ModelParams p = standard_params();
    // smooth positive fields so the positivity clamp never engages and the
    // order study sees pure truncation error
    LatticeState st0;
    st0.Ni = st0.Nj = 10;
    st0.S.resize(100);
    st0.I.resize(100);
    st0.R.resize(100);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            double u = std::sin(0.5 * double(i)) * std::cos(0.4 * double(j));
            st0.S[i * 10 + j] = 1.0 + 0.2 * u;
            st0.I[i * 10 + j] = 0.25 + 0.15 * u;
            st0.R[i * 10 + j] = 0.1;
        }
    auto advance = [&](double dt, double T) {
        LatticeState st = st0;
        int n = int(std::llround(T / dt));
        for (int i = 0; i < n; ++i) step(p, st, dt);
        return st;
    };
    double T = 0.8;  // exact multiple of every dt used
    LatticeState ref = advance(0.05 / 8.0, T);
    LatticeState a = advance(0.05, T);
    LatticeState b = advance(0.025, T);
    double ea = 0.0, eb = 0.0;
    for (std::size_t q = 0; q < ref.S.size(); ++q) {
        ea = std::max({ea, std::fabs(a.S[q] - ref.S[q]), std::fabs(a.I[q] - ref.I[q])});
        eb = std::max({eb, std::fabs(b.S[q] - ref.S[q]), std::fabs(b.I[q] - ref.I[q])});
    }
    double ratio = ea / eb;
    CHECK(ratio > 10.0);
    CHECK(ratio < 26.0);
}

TEST_CASE("S stays bounded by max(S0, initial max) plus recruitment slack") {
    ModelParams p = standard_params();
    SimConfig cfg = small_config();
    LatticeState st = init_lattice(p, cfg);
    double bound = std::max(p.Lambda / p.mu1, *std::max_element(st.S.begin(), st.S.end()))
                 + p.Lambda * cfg.dt;
    for (int n = 0; n < 100; ++n) {
        step(p, st, cfg.dt);
        for (double v : st.S) CHECK(v <= bound);
    }
}

TEST_CASE("front_position") {
    ModelParams p = standard_params();
    double theta = p.theta;

    SUBCASE("synthetic step at 17.25 is recovered within the bin width") {
        LatticeState st;
        st.Ni = st.Nj = 60;
        st.S.assign(3600, 1.0);
        st.I.assign(3600, 0.0);
        st.R.assign(3600, 0.0);
        for (std::size_t i = 0; i < 60; ++i)
            for (std::size_t j = 0; j < 60; ++j) {
                double proj = i * std::cos(theta) + j * std::sin(theta);
                st.I[i * 60 + j] = proj < 17.25 ? 0.4 : 0.0;
            }
        double pos = front_position(st, theta, 0.2);
        CHECK(std::fabs(pos - 17.25) <= 0.5);
    }

    SUBCASE("uniform I errors out") {
        LatticeState st;
        st.Ni = st.Nj = 20;
        st.S.assign(400, 1.0);
        st.I.assign(400, 0.9);
        st.R.assign(400, 0.0);
        CHECK_THROWS_AS(front_position(st, theta, 0.2), std::runtime_error);
        CHECK_FALSE(try_front_position(st, theta, 0.2).has_value());
    }

    SUBCASE("translation equivariance") {
        auto build = [&](double th, double offset) {
            LatticeState st;
            st.Ni = st.Nj = 80;
            st.S.assign(6400, 1.0);
            st.I.assign(6400, 0.0);
            st.R.assign(6400, 0.0);
            for (std::size_t i = 0; i < 80; ++i)
                for (std::size_t j = 0; j < 80; ++j) {
                    double proj = i * std::cos(th) + j * std::sin(th);
                    // wide linear ramp crossing the level
                    double v = 0.4 * std::clamp(1.0 - (proj - offset) / 30.0, 0.0, 1.0);
                    st.I[i * 80 + j] = v;
                }
            return front_position(st, th, 0.2);
        };
        // axis-aligned projection: bins coincide with lattice columns, so an
        // integer shift moves the crossing exactly
        double a0 = build(0.0, 10.0);
        double b0 = build(0.0, 13.0);
        CHECK(b0 - a0 == doctest::Approx(3.0).epsilon(1e-9));
        // oblique projection aliases diagonals against unit bins; the shift
        // is recovered to within the bin width
        double a1 = build(theta, 10.0);
        double b1 = build(theta, 10.0 + 4.0 / std::sqrt(2.0));
        CHECK(std::fabs((b1 - a1) - 4.0 / std::sqrt(2.0)) < 0.5);
    }
}

TEST_CASE("estimate_speed") {
    FrontTrace tr;
    for (int i = 0; i <= 40; ++i) {
        tr.times.push_back(0.5 * i);
        tr.positions.push_back(3.0 * (0.5 * i) + 1.0);
    }
    estimate_speed(tr, 0.5);
    CHECK(tr.speed == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(tr.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    FrontTrace few;
    few.times = {0.0, 1.0, 2.0};
    few.positions = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(estimate_speed(few, 0.5), std::runtime_error);
}

TEST_CASE("supercritical run: the front advances and tracks c*") {
    ModelParams p = standard_params();
    SimConfig cfg;
    cfg.Ni = cfg.Nj = 150;
    cfg.dt = 0.05;
    cfg.t_end = 25.0;
    cfg.seed_fraction = 0.01;
    auto [trace, summary] = run(p, cfg);
    REQUIRE(summary.front_found);
    // monotone advance over the fit window
    for (std::size_t i = 1; i < trace.times.size(); ++i)
        if (trace.times[i] >= trace.fit_t_lo)
            CHECK(trace.positions[i] >= trace.positions[i - 1] - 1e-9);
    double c_star = find_critical(p).c_star;
    CHECK(std::fabs(trace.speed / c_star - 1.0) < 0.2);  // small-domain slack
    CHECK(trace.r_squared > 0.99);
}

TEST_CASE("subthreshold run goes extinct") {
    ModelParams p = standard_params();
    p.beta = 0.5;  // R0 = 0.5
    SimConfig cfg;
    cfg.Ni = cfg.Nj = 100;
    cfg.dt = 0.05;
    cfg.t_end = 45.0;
    cfg.seed_fraction = 0.05;
    cfg.init_level = 0.3;
    auto [trace, summary] = run(p, cfg);
    CHECK(summary.final_max_I < 1e-8);
}

TEST_CASE("R decoupling: S and I are bit-identical without the R pass") {
    ModelParams p = standard_params();
    SimConfig cfg = small_config();
    LatticeState a = init_lattice(p, cfg);
    LatticeState b = a;
    for (int n = 0; n < 100; ++n) {
        step(p, a, cfg.dt, Boundary::copy, true);
        step(p, b, cfg.dt, Boundary::copy, false);
    }
    CHECK(std::memcmp(a.S.data(), b.S.data(), a.S.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.I.data(), b.I.data(), a.I.size() * sizeof(double)) == 0);
}

TEST_CASE("rotation consistency: theta and pi/2 - theta give equal speeds") {
    ModelParams p = standard_params();
    p.theta = M_PI / 3.0;
    SimConfig cfg;
    cfg.Ni = cfg.Nj = 120;
    cfg.dt = 0.05;
    cfg.t_end = 20.0;
    cfg.seed_fraction = 0.02;
    auto [tr1, s1] = run(p, cfg);
    ModelParams q = p;
    q.theta = M_PI / 2.0 - p.theta;  // transposed geometry on a square grid
    auto [tr2, s2] = run(q, cfg);
    REQUIRE(s1.front_found);
    REQUIRE(s2.front_found);
    CHECK(std::fabs(tr1.speed - tr2.speed) / tr1.speed < 0.02);
}

TEST_CASE("nonexistence probe at half the critical speed") {
    ModelParams p = standard_params();
    double c_star = find_critical(p).c_star;
    SimConfig cfg;
    cfg.Ni = cfg.Nj = 200;
    cfg.dt = 0.05;
    cfg.t_end = 30.0;
    NonexistenceReport rep = nonexistence_probe(p, 0.5 * c_star, cfg);
    CHECK(rep.delta_positive);
    CHECK(rep.min_delta > 0.0);
    CHECK(rep.min_delta_grid > 0.0);
    CHECK(rep.pass);
    CHECK(rep.observed_speed > 0.9 * c_star);
    CHECK(rep.margin > 0.0);

    CHECK_THROWS_AS(nonexistence_probe(p, c_star, cfg), std::invalid_argument);
    CHECK_THROWS_AS(nonexistence_probe(p, 1.5 * c_star, cfg), std::invalid_argument);
}

TEST_CASE("CFL guard rejects an oversized step") {
    ModelParams p = standard_params();
    SimConfig cfg = small_config();
    cfg.dt = 0.2;  // 0.2 * (4 + 2 + 1) = 1.4 > 0.5
    CHECK_THROWS_AS(run(p, cfg), std::invalid_argument);
}
