#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "latwave/dispersion.hpp"
#include "test_helpers.hpp"

using namespace latwave;
using namespace latwave::testing;

TEST_CASE("delta(0) = beta*S0 - mu2 for any c and theta") {
    for (int trial = 0; trial < 50; ++trial) {
        ModelParams p = standard_params();
        p.theta = uniform(0.05, M_PI / 2 - 0.05);
        double c = uniform(0.1, 8.0);
        CHECK(delta(p, c, 0.0) == doctest::Approx(p.beta - p.mu2).epsilon(1e-14));
    }
}

TEST_CASE("delta with d2 = 0 reduces to -c*lambda + beta*S0 - mu2") {
    ModelParams p = standard_params();
    p.d2 = 0.0;
    CHECK(delta(p, 1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("delta matches the high-precision oracle value") {
    ModelParams p = standard_params();
    CHECK(delta(p, 3.0, 0.5) == doctest::Approx(kDelta_c3_l05).epsilon(1e-14));
}

TEST_CASE("overflow guard raises range_error") {
    ModelParams p = standard_params();
    CHECK_THROWS_AS(delta(p, 1.0, 1200.0), std::range_error);
    CHECK_THROWS_AS(delta_dlambda(p, 1.0, -1200.0), std::range_error);
}

TEST_CASE("analytic derivative: -c at 0, matches finite differences, increasing") {
    ModelParams p = standard_params();
    for (double c : {0.5, 2.0, 5.0})
        CHECK(delta_dlambda(p, c, 0.0) == doctest::Approx(-c).epsilon(1e-14));

    for (int trial = 0; trial < 1000; ++trial) {
        ModelParams q = standard_params();
        q.theta = uniform(0.05, M_PI / 2 - 0.05);
        double c = uniform(0.1, 5.0), lam = uniform(0.0, 4.0);
        double fd = (delta(q, c, lam + 1e-6) - delta(q, c, lam - 1e-6)) / 2e-6;
        double an = delta_dlambda(q, c, lam);
        CHECK(std::fabs(an - fd) <= 1e-6 * std::max(1.0, std::fabs(an)));
    }

    // strict convexity: derivative increasing in lambda
    for (int trial = 0; trial < 10000; ++trial) {
        double c = uniform(0.1, 5.0);
        double a = uniform(0.0, 3.0), b = a + uniform(1e-3, 1.0);
        CHECK(delta_dlambda(p, c, b) > delta_dlambda(p, c, a));
        CHECK(delta_d2lambda(p, c, a) > 0.0);
    }
}

TEST_CASE("find_critical matches the oracle and its certificates") {
    ModelParams p = standard_params();
    CriticalPair crit = find_critical(p);
    CHECK(crit.c_star == doctest::Approx(kCStar).epsilon(1e-10));
    CHECK(crit.lambda_star == doctest::Approx(kLambdaStar).epsilon(1e-10));
    double tol = 1e-9 * delta_scale(p);
    CHECK(std::fabs(crit.min_value) < tol);
    CHECK(std::fabs(crit.dlambda_value) < tol);
    CHECK(crit.c_star > 0.0);
    CHECK(crit.lambda_star > 0.0);
}

TEST_CASE("theta -> pi/2 - theta leaves the critical pair unchanged") {
    ModelParams p = standard_params();
    p.theta = 1.1;
    CriticalPair a = find_critical(p);
    p.theta = M_PI / 2 - 1.1;
    CriticalPair b = find_critical(p);
    CHECK(a.c_star == doctest::Approx(b.c_star).epsilon(1e-12));
    CHECK(a.lambda_star == doctest::Approx(b.lambda_star).epsilon(1e-12));
}

TEST_CASE("find_critical against a brute-force 2-D grid scan with refinement") {
    ModelParams p = standard_params();
    CriticalPair crit = find_critical(p);
    // locate (c, lambda) minimizing |Delta| + |dDelta| by scan + refinement
    double c_lo = 0.5, c_hi = 4.0, l_lo = 0.1, l_hi = 3.0;
    double best_c = 0, best_l = 0;
    for (int level = 0; level < 8; ++level) {
        double best = 1e300;
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                double c = c_lo + (c_hi - c_lo) * i / 40.0;
                double l = l_lo + (l_hi - l_lo) * j / 40.0;
                double score = std::fabs(delta(p, c, l)) + std::fabs(delta_dlambda(p, c, l));
                if (score < best) { best = score; best_c = c; best_l = l; }
            }
        double dc = (c_hi - c_lo) / 40.0, dl = (l_hi - l_lo) / 40.0;
        c_lo = best_c - 2 * dc; c_hi = best_c + 2 * dc;
        l_lo = best_l - 2 * dl; l_hi = best_l + 2 * dl;
    }
    CHECK(std::fabs(delta(p, best_c, best_l)) < 1e-6);
    CHECK(best_c == doctest::Approx(crit.c_star).epsilon(1e-6));
    CHECK(best_l == doctest::Approx(crit.lambda_star).epsilon(1e-5));
}

TEST_CASE("c* increases with d2") {
    ModelParams p = standard_params();
    p.d2 = 0.5;
    double c_half = find_critical(p).c_star;
    p.d2 = 1.0;
    double c_one = find_critical(p).c_star;
    p.d2 = 2.0;
    double c_two = find_critical(p).c_star;
    CHECK(c_half == doctest::Approx(kCStar_d2_half).epsilon(1e-9));
    CHECK(c_two == doctest::Approx(kCStar_d2_two).epsilon(1e-9));
    CHECK(c_half < c_one);
    CHECK(c_one < c_two);
}

TEST_CASE("find_roots: oracle values, certificates, limits toward c*") {
    ModelParams p = standard_params();
    CriticalPair crit = find_critical(p);
    RootPair roots = find_roots(p, 1.5 * crit.c_star, crit);
    CHECK(roots.lambda1 == doctest::Approx(kLambda1).epsilon(1e-10));
    CHECK(roots.lambda2 == doctest::Approx(kLambda2).epsilon(1e-10));
    CHECK(roots.lambda1 < crit.lambda_star);
    CHECK(crit.lambda_star < roots.lambda2);
    double tol = 1e-9 * delta_scale(p);
    CHECK(std::fabs(delta(p, 1.5 * crit.c_star, roots.lambda1)) < tol);
    CHECK(std::fabs(delta(p, 1.5 * crit.c_star, roots.lambda2)) < tol);

    SUBCASE("roots straddle and converge to lambda* as c decreases to c*") {
        double prev_spread = 1e300;
        for (int k = 2; k <= 6; ++k) {
            double c = crit.c_star * (1.0 + std::pow(10.0, -k));
            RootPair r = find_roots(p, c, crit);
            CHECK(r.lambda1 < crit.lambda_star);
            CHECK(r.lambda2 > crit.lambda_star);
            double spread = r.lambda2 - r.lambda1;
            CHECK(spread < prev_spread);
            prev_spread = spread;
            if (k == 6) {
                CHECK(std::fabs(r.lambda1 - crit.lambda_star) < 0.01);
                CHECK(std::fabs(r.lambda2 - crit.lambda_star) < 0.01);
            }
        }
    }

    SUBCASE("c = c* rejected") {
        CHECK_THROWS_AS(find_roots(p, crit.c_star, crit), std::domain_error);
        CHECK_THROWS_AS(find_roots(p, 0.5 * crit.c_star, crit), std::domain_error);
    }

    SUBCASE("sign pattern over 1000 sampled lambda") {
        double c = 1.5 * crit.c_star;
        for (int i = 1; i <= 1000; ++i) {
            double lam = 1.2 * roots.lambda2 * i / 1000.0;
            double v = delta(p, c, lam);
            if (lam < roots.lambda1 || lam > roots.lambda2)
                CHECK(v > 0.0);
            else if (lam > roots.lambda1 && lam < roots.lambda2)
                CHECK(v < 0.0);
        }
    }
}

TEST_CASE("classify_speed") {
    ModelParams p = standard_params();
    CriticalPair crit = find_critical(p);
    CHECK(classify_speed(p, 0.5 * crit.c_star) == SpeedClass::subcritical);
    CHECK(delta_min(p, 0.5 * crit.c_star) > 0.0);
    CHECK(classify_speed(p, crit.c_star) == SpeedClass::critical);
    CHECK(classify_speed(p, 2.0 * crit.c_star) == SpeedClass::supercritical);
    CHECK(delta_min(p, 2.0 * crit.c_star) < 0.0);
}

TEST_CASE("joint scaling of (d2, beta, mu2, Lambda, mu1) by k") {
    ModelParams p = standard_params();
    CriticalPair base = find_critical(p);
    RootPair base_roots = find_roots(p, 1.5 * base.c_star, base);
    for (double k : {0.5, 2.0}) {
        ModelParams q = p;
        q.d2 *= k;
        q.beta *= k;
        q.mu2 *= k;
        q.Lambda *= k;
        q.mu1 *= k;  // S0 unchanged
        for (int trial = 0; trial < 100; ++trial) {
            double c = uniform(0.1, 4.0), lam = uniform(0.0, 3.0);
            CHECK(delta(q, k * c, lam) == doctest::Approx(k * delta(p, c, lam)).epsilon(1e-12));
        }
        CriticalPair sc = find_critical(q);
        CHECK(sc.c_star == doctest::Approx(k * base.c_star).epsilon(1e-9));
        CHECK(sc.lambda_star == doctest::Approx(base.lambda_star).epsilon(1e-9));
        RootPair r = find_roots(q, k * 1.5 * base.c_star, sc);
        CHECK(r.lambda1 == doctest::Approx(base_roots.lambda1).epsilon(1e-9));
        CHECK(r.lambda2 == doctest::Approx(base_roots.lambda2).epsilon(1e-9));
    }
}

TEST_CASE("preconditions") {
    ModelParams p = standard_params();
    p.beta = 0.5;  // R0 = 0.5
    CHECK_THROWS_AS(find_critical(p), std::domain_error);
    CHECK_THROWS_AS(classify_speed(p, 1.0), std::domain_error);
    ModelParams q = standard_params();
    q.d2 = 0.0;
    CHECK_THROWS_AS(find_critical(q), std::invalid_argument);
}
