#include <doctest.h>

#include <cmath>

#include "latwave/envelope.hpp"
#include "test_helpers.hpp"

using namespace latwave;
using namespace latwave::testing;

namespace {

struct Setup {
    ModelParams p;
    Equilibria eq;
    double c;
    RootPair roots;
    EnvelopeParams env;
};

Setup make_setup(ModelParams p, double c_factor = 1.5) {
    Setup s;
    s.p = p;
    s.eq = equilibria(p);
    CriticalPair crit = find_critical(p);
    s.c = c_factor * crit.c_star;
    s.roots = find_roots(p, s.c, crit);
    s.env = select_envelope(p, s.c, s.roots);
    return s;
}

} // namespace

TEST_CASE("select_envelope satisfies every stated constraint") {
    Setup s = make_setup(standard_params());
    const EnvelopeParams& e = s.env;
    CHECK(e.I0 >= (s.p.beta * s.eq.S0 - s.p.mu2) / (s.p.alpha * s.p.mu2));
    CHECK(e.eps1 > 0.0);
    CHECK(e.eps1 < e.lambda1);
    CHECK(e.eps2 > 0.0);
    CHECK(e.eps2 < e.lambda1);
    CHECK(e.eps2 <= e.eps1);
    CHECK(delta(s.p, s.c, e.lambda1 + e.eps2) < 0.0);
    CHECK(e.M1 > 1.0);
    CHECK(e.M2 > 1.0);
    CHECK(e.knot1 < 0.0);
    CHECK(e.knot2 < 0.0);
    CHECK(e.lambda1 == doctest::Approx(s.roots.lambda1));
}

TEST_CASE("S lower-solution margin tends to -mu1 as eps -> 0") {
    ModelParams p = standard_params();
    double s = std::sin(p.theta), k = std::cos(p.theta);
    double eps = 1e-10;
    double bracket = p.d1 * (std::exp(eps * s) + std::exp(-eps * s) +
                             std::exp(eps * k) + std::exp(-eps * k) - 4.0)
                   - p.mu1 - 3.0 * eps;
    CHECK(bracket == doctest::Approx(-p.mu1).epsilon(1e-8));
}

TEST_CASE("envelope function shapes") {
    Setup s = make_setup(standard_params());
    const EnvelopeParams& e = s.env;
    double plateau_at = std::log(e.I0) / e.lambda1;

    SUBCASE("I+ plateau beyond ln(I0)/lambda1") {
        for (double xi : {plateau_at + 0.1, plateau_at + 3.0, plateau_at + 40.0})
            CHECK(upper_I(e, s.eq, xi) == e.I0);
        CHECK(upper_I(e, s.eq, plateau_at - 1.0) < e.I0);
    }

    SUBCASE("S- vanishes at and beyond the knot") {
        CHECK(lower_S(e, s.eq, e.knot1) == doctest::Approx(0.0).epsilon(1e-12));
        for (double xi : {e.knot1 + 0.1, e.knot1 + 5.0, 50.0})
            CHECK(lower_S(e, s.eq, xi) == 0.0);
        CHECK(lower_S(e, s.eq, e.knot1 - 1.0) > 0.0);
    }

    SUBCASE("ordering at random points") {
        for (int trial = 0; trial < 10000; ++trial) {
            double xi = uniform(-300.0, 300.0);
            CHECK(lower_S(e, s.eq, xi) <= upper_S(e, s.eq, xi));
            CHECK(lower_I(e, s.eq, xi) <= upper_I(e, s.eq, xi) * (1 + 1e-15));
            CHECK(lower_S(e, s.eq, xi) >= 0.0);
            CHECK(lower_I(e, s.eq, xi) >= 0.0);
        }
    }

    SUBCASE("asymptotics at xi = -50/eps") {
        double xi1 = -50.0 / e.eps1;
        CHECK(lower_S(e, s.eq, xi1) == doctest::Approx(s.eq.S0).epsilon(1e-12));
        double xi2 = -50.0 / e.eps2;
        CHECK(lower_I(e, s.eq, xi2) / std::exp(e.lambda1 * xi2) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("inequality (a) is exactly zero where I- vanishes") {
    Setup s = make_setup(standard_params());
    // knot2 < 0 and I- = 0 for xi >= knot2, so any xi >= knot2 + 1 works
    for (double xi : {s.env.knot2 + 1.5, 0.0, 10.0, 100.0}) {
        double ra, rb, rc, rd;
        envelope_residuals(s.p, s.c, s.env, xi, ra, rb, rc, rd);
        CHECK(ra == 0.0);
    }
}

TEST_CASE("inequality (b) on the exponential branch") {
    Setup s = make_setup(standard_params());
    double plateau_at = std::log(s.env.I0) / s.env.lambda1;
    for (double xi : {plateau_at - 2.0, plateau_at - 10.0, plateau_at - 30.0}) {
        double ra, rb, rc, rd;
        envelope_residuals(s.p, s.c, s.env, xi, ra, rb, rc, rd);
        CHECK(rb >= 0.0);
    }
}

TEST_CASE("verify_upper_lower: empty violation set on the auto-selected envelope") {
    Setup s = make_setup(standard_params());
    CertificateReport rep = verify_upper_lower(s.p, s.c, s.env, 100.0, 20001);
    CHECK(rep.pass);
    CHECK(rep.a.violations == 0);
    CHECK(rep.b.violations == 0);
    CHECK(rep.c.violations == 0);
    CHECK(rep.d.violations == 0);
    CHECK(rep.violating_xi.empty());
    CHECK(rep.points_checked > 19000);
    // residual signs carry information, not just pass/fail
    CHECK(rep.a.min_residual >= 0.0);
    CHECK(rep.b.min_residual >= -rep.tolerance);
    CHECK(rep.c.max_residual <= rep.tolerance);
    CHECK(rep.d.max_residual <= rep.tolerance);
}

TEST_CASE("verify_upper_lower on an asymmetric parameter set") {
    ModelParams p;
    p.d1 = 0.7;
    p.d2 = 1.3;
    p.d3 = 0.5;
    p.Lambda = 0.8;
    p.beta = 1.8;
    p.alpha = 0.6;
    p.mu1 = 0.9;
    p.mu2 = 0.7;
    p.gamma = 0.3;
    p.theta = 1.0;
    REQUIRE(basic_reproduction(p) > 1.0);
    Setup s = make_setup(p, 1.3);
    CertificateReport rep = verify_upper_lower(s.p, s.c, s.env, 150.0, 15001);
    CHECK(rep.pass);
}

TEST_CASE("a too-small M2 is caught by the certificate") {
    Setup s = make_setup(standard_params());
    EnvelopeParams weak = s.env;
    weak.M2 = 2.0;  // drops the (S0 - S-) slack coverage
    weak.knot2 = std::log(1.0 / weak.M2) / weak.eps2;
    CertificateReport rep = verify_upper_lower(s.p, s.c, weak, 100.0, 20001);
    CHECK_FALSE(rep.pass);
    CHECK(rep.d.violations > 0);
    CHECK(rep.d.max_residual > rep.tolerance);
}
