#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "latwave/model.hpp"
#include "test_helpers.hpp"

using namespace latwave;
using namespace latwave::testing;

TEST_CASE("validate_params accepts the standard set and rejects violations") {
    ModelParams p = standard_params();
    CHECK_NOTHROW(validate_params(p, true));

    ModelParams bad = p;
    bad.beta = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);

    bad = p;
    bad.theta = 0.0;
    CHECK_NOTHROW(validate_params(bad, false));  // simulator accepts any theta
    CHECK_THROWS_AS(validate_params(bad, true), std::invalid_argument);

    bad = p;
    bad.d1 = std::nan("");
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = p;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = p;
    bad.mu2 = -1.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
}

TEST_CASE("disease-free equilibrium") {
    ModelParams p = standard_params();
    CHECK(disease_free_equilibrium(p) == 1.0);
    p.Lambda = 2.0;
    p.mu1 = 4.0;
    CHECK(disease_free_equilibrium(p) == 0.5);
    p.Lambda = p.mu1 = 0.37;
    CHECK(disease_free_equilibrium(p) == doctest::Approx(1.0).epsilon(1e-15));
    // residual certificate
    CHECK(std::fabs(p.Lambda - p.mu1 * disease_free_equilibrium(p)) <= 1e-12 * p.Lambda);
}

TEST_CASE("endemic equilibrium closed form and certificates") {
    ModelParams p = standard_params();
    double S, I;
    endemic_equilibrium(p, S, I);
    CHECK(S == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(I == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    Equilibria eq = equilibria(p);
    CHECK(std::fabs(eq.residual_S) < 1e-15);
    CHECK(std::fabs(eq.residual_I) < 1e-15);

    SUBCASE("R0 = 1 boundary errors") {
        ModelParams b = p;
        b.beta = 1.0;  // beta*Lambda = mu1*mu2
        CHECK(basic_reproduction(b) == 1.0);
        CHECK_THROWS_AS(endemic_equilibrium(b, S, I), std::domain_error);
    }

    SUBCASE("large-alpha asymptote I* -> (Lambda beta - mu1 mu2)/(mu2 mu1 alpha)") {
        ModelParams b = p;
        b.alpha = 1e6;
        endemic_equilibrium(b, S, I);
        double asym = (b.Lambda * b.beta - b.mu1 * b.mu2) / (b.mu2 * b.mu1 * b.alpha);
        CHECK(I == doctest::Approx(asym).epsilon(1e-5));
    }
}

TEST_CASE("basic reproduction number") {
    ModelParams p = standard_params();
    CHECK(basic_reproduction(p) == 2.0);

    ModelParams q = p;
    q.beta = q.mu2 = 0.7;  // beta = mu2, S0 = 1
    CHECK(basic_reproduction(q) == doctest::Approx(1.0).epsilon(1e-15));

    ModelParams r = p;
    r.beta *= 2.0;
    CHECK(basic_reproduction(r) == doctest::Approx(2.0 * basic_reproduction(p)).epsilon(1e-15));
}

TEST_CASE("endemic residuals stay below 1e-10 over random draws with R0 > 1") {
    for (int trial = 0; trial < 1000; ++trial) {
        ModelParams p;
        p.Lambda = uniform(0.2, 5.0);
        p.mu1 = uniform(0.2, 3.0);
        p.mu2 = uniform(0.2, 3.0);
        p.alpha = uniform(0.05, 10.0);
        // force R0 > 1
        p.beta = uniform(1.05, 8.0) * p.mu2 * p.mu1 / p.Lambda;
        Equilibria eq = equilibria(p);
        REQUIRE(eq.endemic);
        double scale = std::max(p.Lambda, p.mu2 * eq.I_star);
        CHECK(std::fabs(eq.residual_S) <= 1e-10 * scale);
        CHECK(std::fabs(eq.residual_I) <= 1e-10 * scale);
    }
}

TEST_CASE("I* monotone in beta and alpha (finite differences of the closed form)") {
    ModelParams p = standard_params();
    auto istar = [&](double beta, double alpha) {
        ModelParams q = p;
        q.beta = beta;
        q.alpha = alpha;
        double S, I;
        endemic_equilibrium(q, S, I);
        return I;
    };
    for (double beta = 1.2; beta < 6.0; beta += 0.4)
        CHECK(istar(beta + 1e-4, 1.0) > istar(beta, 1.0));
    for (double alpha = 0.1; alpha < 5.0; alpha += 0.3)
        CHECK(istar(2.0, alpha + 1e-4) < istar(2.0, alpha));
}

TEST_CASE("R0 > 1 iff endemic equilibrium exists") {
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p;
        p.Lambda = uniform(0.2, 4.0);
        p.mu1 = uniform(0.2, 2.0);
        p.mu2 = uniform(0.2, 2.0);
        p.beta = uniform(0.05, 4.0);
        p.alpha = uniform(0.1, 3.0);
        double S, I;
        if (basic_reproduction(p) > 1.0) {
            CHECK_NOTHROW(endemic_equilibrium(p, S, I));
            CHECK(S > 0.0);
            CHECK(I > 0.0);
        } else {
            CHECK_THROWS_AS(endemic_equilibrium(p, S, I), std::domain_error);
        }
    }
}
