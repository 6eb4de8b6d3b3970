#include <doctest.h>

#include "csum/errors.hpp"
#include "csum/exact.hpp"

#include <cmath>

using namespace csum;

TEST_CASE("defect mass") {
    CHECK(defect_mass({2.0, 1.0, 1.0, 10.0}) == 1.0);   // r = 2 >= 1
    CHECK(defect_mass({2.0, 1.0, 2.0, 10.0}) == 1.0);   // r = 1 boundary
    CHECK(defect_mass({2.0, 1.0, 4.0, 0.0}) == doctest::Approx(0.5)); // r e^0
    CHECK(defect_mass({2.0, 1.0, 4.0, 10.0}) ==
          doctest::Approx(0.5 * std::exp(-5.0)).epsilon(1e-14));
    CHECK(defect_mass({2.0, 1.0, 4.0, 1e6}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(defect_mass({0.0, 1.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(defect_mass({1.0, 1.0, -1.0, 1.0}), DomainError);
}

TEST_CASE("integrand: endpoint limit and envelope bound") {
    const ExpModel m{2.0, 1.0, 4.0, 10.0}; // r = 0.5
    CHECK(integrand_f(0.0, m, 20.0) == 0.0);
    CHECK(std::fabs(integrand_f(1e-9, m, 20.0)) < 1e-6);

    const double r = m.ratio_r(), sr = std::sqrt(r);
    for (double z = 0.05; z < M_PI; z += 0.1) {
        const double denom = 1.0 + r - 2.0 * sr * std::cos(z);
        const double bound =
            r / denom * 2.0 * std::exp(m.level_t * m.rho * (sr - 1.0));
        CHECK(std::fabs(integrand_f(z, m, 20.0)) <= bound * (1.0 + 1e-12));
    }
    // critical model: finite positive limit at z = 0 instead of 0/0
    const ExpModel crit{2.0, 1.0, 2.0, 10.0};
    CHECK(integrand_f(0.0, crit, 5.0) ==
          doctest::Approx(2.0 * (crit.level_t * crit.rho + 1.0)));
    CHECK(integrand_f(1e-8, crit, 5.0) ==
          doctest::Approx(integrand_f(0.0, crit, 5.0)).epsilon(1e-4));
}

TEST_CASE("integrand spot value against an independent transcription") {
    // evaluated separately with 25-digit arithmetic from the printed display
    const ExpModel m{2.0, 1.0, 2.0, 10.0};
    const double v = integrand_f(M_PI / 3.0, m, 5.0);
    CHECK(v == doctest::Approx(-1.4778472131270367e-07).epsilon(1e-9));
}

TEST_CASE("exact cdf reference values") {
    // frozen against two independent quadrature implementations
    CHECK(exact_cdf({2.0, 1.0, 2.0, 10.0}, 200.0) ==
          doctest::Approx(0.699158981489).epsilon(1e-8));
    CHECK(exact_cdf({2.0, 1.0, 1.5, 10.0}, 200.0) ==
          doctest::Approx(0.999918610792).epsilon(1e-8));
    CHECK(exact_cdf({2.0, 1.0, 4.0, 10.0}, 200.0) ==
          doctest::Approx(0.003368973500).epsilon(1e-6));
    CHECK(exact_cdf({2.0, 1.0, 2.0, 10.0}, 50.0) ==
          doctest::Approx(0.447910412387).epsilon(1e-8));
}

TEST_CASE("exact cdf is a cdf in x and shrinks with the level") {
    const ExpModel m{2.0, 1.0, 1.8, 10.0};
    double prev = 0.0;
    for (double x = 1.0; x <= 501.0; x += 25.0) {
        const double v = exact_cdf(m, x);
        CHECK(v >= prev - 1e-9);
        CHECK(v <= 1.0);
        prev = v;
    }
    // non-increasing in the level t at fixed horizon
    double prev_t = 1.0;
    for (double t : {5.0, 10.0, 20.0, 40.0}) {
        const double v = exact_cdf({2.0, 1.0, 1.8, t}, 100.0);
        CHECK(v <= prev_t + 1e-9);
        prev_t = v;
    }
}

TEST_CASE("exact cdf saturates at the defect") {
    for (double c : {2.5, 4.0}) {
        const ExpModel m{2.0, 1.0, c, 10.0};
        const double d = defect_mass(m);
        for (double x : {20.0, 50.0, 200.0})
            CHECK(exact_cdf(m, x) <= d + 1e-9);
        CHECK(std::fabs(exact_cdf(m, 1e4 * m.level_t) - d) < 1e-4);
    }
    // proper case saturates at 1
    CHECK(std::fabs(exact_cdf({2.0, 1.0, 1.5, 10.0}, 1e4 * 10.0) - 1.0) < 1e-4);
}

TEST_CASE("exact cdf rejects bad arguments") {
    CHECK_THROWS_AS(exact_cdf({2.0, 1.0, 2.0, 10.0}, 0.0), DomainError);
    CHECK_THROWS_AS(exact_cdf({2.0, 1.0, 2.0, 10.0}, -5.0), DomainError);
}
