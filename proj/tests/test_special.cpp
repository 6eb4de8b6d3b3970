#include <doctest.h>

#include "csum/errors.hpp"
#include "csum/special.hpp"

#include <cmath>
#include <limits>

using namespace csum;

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // reference value from a 25-digit erf evaluation
    CHECK(std::fabs(std_normal_cdf(1.96) - 0.9750021048517796) < 1e-12);
    CHECK(std::fabs(std_normal_cdf(-1.0) - (1.0 - std_normal_cdf(1.0))) < 1e-15);

    double prev = -1.0;
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        const double p = std_normal_cdf(x);
        CHECK(p >= prev); // monotone
        prev = p;
        CHECK(std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("standard normal pdf") {
    CHECK(std::fabs(std_normal_pdf(0.0) - 0.3989422804014327) < 1e-15);
    CHECK(std::fabs(std_normal_pdf(1.0) - 0.24197072451914337) < 1e-14);
    for (double x = 0.0; x <= 6.0; x += 0.37)
        CHECK(std_normal_pdf(x) == std_normal_pdf(-x));
    CHECK(std_normal_pdf(10.0) > 0.0);
    CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("pdf is the derivative of cdf") {
    const double h = 1e-6;
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        const double fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2 * h);
        CHECK(std::fabs(fd - std_normal_pdf(x)) < 1e-9);
    }
}

TEST_CASE("log normal cdf matches cdf and extends into the deep tail") {
    for (double x : {-30.0, -10.0, -3.0, 0.0, 2.0}) {
        CHECK(std::fabs(std::exp(log_std_normal_cdf(x)) - std_normal_cdf(x)) <
              1e-13 * std_normal_cdf(x) + 1e-300);
    }
    // tail expansion region: value must keep the asymptotic identity
    // log Phi(x) ~ -x^2/2 - log(-x sqrt(2 pi)) + log(1 - 1/x^2 + ...)
    const double x = -45.0;
    const double lead = -0.5 * x * x - std::log(-x * std::sqrt(2.0 * M_PI));
    const double got = log_std_normal_cdf(x);
    CHECK(got < lead);
    CHECK(std::fabs(got - lead) < 1e-3 * std::fabs(lead));
}

TEST_CASE("inverse gaussian cdf reference points") {
    // mu = 1, lambda = 1 at z = 1: 1/2 + e^2 Phi(-2)
    CHECK(std::fabs(inv_gaussian_cdf(1.0, 1.0, 1.0) - 0.6681020012231706) < 1e-12);
    // inv_mean = 0 branch
    CHECK(std::fabs(inv_gaussian_cdf(1.0, 0.0, 4.0) - 0.04550026389635841) < 1e-13);
    // normalization
    CHECK(inv_gaussian_cdf(1e8, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inv_gaussian_cdf(1e9, 0.0, 2.0) > 0.999);

    CHECK_THROWS_AS(inv_gaussian_cdf(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(inv_gaussian_cdf(-1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(inv_gaussian_cdf(1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(inv_gaussian_cdf(1.0, -0.5, 1.0), DomainError);
}

TEST_CASE("inverse gaussian cdf is monotone and survives extreme shapes") {
    double prev = 0.0;
    for (double z = 0.05; z < 12.0; z += 0.05) {
        const double v = inv_gaussian_cdf(z, 0.5, 2.0);
        CHECK(v >= prev - 1e-14);
        CHECK(v <= 1.0);
        prev = v;
    }
    // huge lambda/mu: raw exp(2 lambda/mu) overflows, log-space path must not
    const double v = inv_gaussian_cdf(0.5, 1.0, 1e6);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::isfinite(v));
}

namespace {
// independent oracle: composite Simpson over the inverse Gaussian density
double ig_cdf_by_density(double z, double mu, double lambda) {
    const int n = 20000;
    const double h = z / n;
    auto dens = [&](double u) {
        if (u <= 0.0) return 0.0;
        return std::sqrt(lambda / (2.0 * M_PI * u * u * u)) *
               std::exp(-lambda * (u - mu) * (u - mu) / (2.0 * mu * mu * u));
    };
    double acc = dens(0.0) + dens(z);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * dens(i * h);
    return acc * h / 3.0;
}
} // namespace

TEST_CASE("inverse gaussian cdf agrees with quadrature of its density") {
    for (double mu : {0.5, 1.0, 2.0, 5.0})
        for (double lambda : {0.5, 1.0, 2.0, 5.0})
            for (double z : {0.4, 1.0, 2.7}) {
                const double a = inv_gaussian_cdf(z, 1.0 / mu, lambda);
                const double b = ig_cdf_by_density(z, mu, lambda);
                CHECK(std::fabs(a - b) < 1e-8);
            }
}

TEST_CASE("integrate basics") {
    QuadratureSpec spec;
    CHECK(std::fabs(integrate([](double z) { return std::sin(z); }, 0.0, M_PI, spec) - 2.0) < 1e-10);
    CHECK(std::fabs(integrate([](double z) { return z * z; }, 0.0, 1.0, spec) - 1.0 / 3.0) < 1e-12);
    CHECK(std::fabs(integrate([](double z) { return std::cos(8.0 * z); }, 0.0, M_PI, spec)) < 1e-10);
}

TEST_CASE("integrate is linear") {
    QuadratureSpec spec;
    auto f = [](double z) { return std::exp(-z * z); };
    auto g = [](double z) { return std::cos(3.0 * z); };
    const double a = 2.5, b = -1.25;
    const double lhs = integrate([&](double z) { return a * f(z) + b * g(z); }, -1.0, 2.0, spec);
    const double rhs = a * integrate(f, -1.0, 2.0, spec) + b * integrate(g, -1.0, 2.0, spec);
    CHECK(std::fabs(lhs - rhs) < 1e-9);
}

TEST_CASE("integrate reports accuracy failure with its best estimate") {
    QuadratureSpec tight{1e-14, 1e-14, 3}; // depth too small for this kink
    bool threw = false;
    try {
        integrate([](double z) { return std::sqrt(std::fabs(z - 0.3337)); }, 0.0, 1.0, tight);
    } catch (const AccuracyError& e) {
        threw = true;
        CHECK(std::fabs(e.best_estimate - 0.49113) < 0.05); // coarse but present
    }
    CHECK(threw);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 1.0, QuadratureSpec{}), DomainError);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{-1.0, 1e-9, 10}),
                    DomainError);
}
