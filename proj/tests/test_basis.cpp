#include <doctest.h>

#include "csum/basis.hpp"
#include "csum/errors.hpp"

#include <cmath>
#include <vector>

using namespace csum;

namespace {

struct SampleMoments {
    double mean_t, mean_x, var_t, var_x, cov;
    double se_mean_t, se_mean_x;
};

SampleMoments estimate(const BasisSpec& b, std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    double st = 0, sx = 0, stt = 0, sxx = 0, stx = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const Pair p = sample_pair(b, rng);
        st += p.t;
        sx += p.x;
        stt += p.t * p.t;
        sxx += p.x * p.x;
        stx += p.t * p.x;
    }
    SampleMoments m;
    m.mean_t = st / n;
    m.mean_x = sx / n;
    m.var_t = std::max(stt / n - m.mean_t * m.mean_t, 0.0);
    m.var_x = std::max(sxx / n - m.mean_x * m.mean_x, 0.0);
    m.cov = stx / n - m.mean_t * m.mean_x;
    m.se_mean_t = std::sqrt(m.var_t / n);
    m.se_mean_x = std::sqrt(m.var_x / n);
    return m;
}

} // namespace

TEST_CASE("critical premium") {
    BasisSpec b = RiskBasis{Exponential{2.0}, Exponential{1.0}, 1.0};
    CHECK(critical_premium(b) == doctest::Approx(2.0));
    BasisSpec same = RiskBasis{Gamma{2.0, 3.0}, Gamma{2.0, 3.0}, 1.0};
    CHECK(critical_premium(same) == doctest::Approx(1.0));
    BasisSpec det = RiskBasis{Deterministic{2.0}, Deterministic{3.0}, 1.0};
    CHECK(critical_premium(det) == doctest::Approx(1.5));
    BasisSpec d = DirectBasis{Exponential{1.0}, Exponential{1.0}, Ordinary{}};
    CHECK_THROWS_AS(critical_premium(d), ModelError);
}

TEST_CASE("risk-form moments, closed forms") {
    BasisSpec b = RiskBasis{Exponential{2.0}, Exponential{1.0}, 4.0};
    const MomentSet m = moments(b);
    CHECK(m.mu_T == doctest::Approx(-1.0));
    CHECK(m.var_T == doctest::Approx(5.0));
    CHECK(m.cov_XT == doctest::Approx(-1.0));
    CHECK(m.h(1, 1) == doctest::Approx(-1.0));
    CHECK(m.h30 == doctest::Approx(0.25));   // 2/rho_X^3
    CHECK(m.h21 == doctest::Approx(-1.0));   // -c m3X
    CHECK(m.h12 == doctest::Approx(4.0));    // c^2 m3X
    CHECK(m.h03 == doctest::Approx(-14.0));  // m3Y - c^3 m3X
    CHECK(m.h(2, 0) == m.var_X);
    CHECK(m.h(0, 2) == m.var_T);
    CHECK(std::fabs(m.cov_XT) <= std::sqrt(m.var_X * m.var_T) + 1e-12);
    CHECK_THROWS_AS(m.h(2, 2), DomainError);
}

TEST_CASE("direct moments: exponential identity and near-zero premium") {
    BasisSpec d = DirectBasis{Exponential{0.5}, Uniform{0.0, 3.0}, Ordinary{}};
    const MomentSet m = moments(d);
    CHECK(m.var_T == doctest::Approx(m.mu_T * m.mu_T)); // Exp: DT = (ET)^2
    CHECK(m.cov_XT == 0.0);
    CHECK(m.h21 == 0.0);
    CHECK(m.h12 == 0.0);

    BasisSpec tiny_c = RiskBasis{Exponential{2.0}, Exponential{1.0}, 1e-9};
    CHECK(std::fabs(moments(tiny_c).cov_XT) < 1e-9); // cov -> 0 with c
}

TEST_CASE("risk-form drift changes sign exactly at the critical premium") {
    const double cstar = 2.0;
    for (double eps : {1e-9, 1e-3, 0.5}) {
        BasisSpec lo = RiskBasis{Exponential{2.0}, Exponential{1.0}, cstar - eps};
        BasisSpec hi = RiskBasis{Exponential{2.0}, Exponential{1.0}, cstar + eps};
        CHECK(moments(lo).mu_T > 0.0);
        CHECK(moments(hi).mu_T < 0.0);
    }
    BasisSpec at = RiskBasis{Exponential{2.0}, Exponential{1.0}, cstar};
    CHECK(moments(at).mu_T == doctest::Approx(0.0));
}

TEST_CASE("sample_pair: deterministic components and risk construction") {
    BasisSpec det = DirectBasis{Deterministic{0.7}, Deterministic{2.5}, Ordinary{}};
    Rng rng(42);
    for (int i = 0; i < 16; ++i) {
        const Pair p = sample_pair(det, rng);
        CHECK(p.t == 0.7);
        CHECK(p.x == 2.5);
    }
    // risk pair with deterministic parts: t = y - c x exactly
    BasisSpec r = RiskBasis{Deterministic{2.0}, Deterministic{3.0}, 1.5};
    const Pair p = sample_pair(r, rng);
    CHECK(p.t == 3.0 - 1.5 * 2.0);
    CHECK(p.x == 2.0);
    // dependent pair: y recovered from (t, x) must be positive
    BasisSpec rx = RiskBasis{Exponential{2.0}, Exponential{1.0}, 4.0};
    for (int i = 0; i < 1000; ++i) {
        const Pair q = sample_pair(rx, rng);
        CHECK(q.x > 0.0);
        CHECK(q.t + 4.0 * q.x > 0.0); // = y
    }
}

TEST_CASE("moments agree with Monte Carlo for every supported variant") {
    const std::uint64_t n = 10000000;
    const std::vector<BasisSpec> bases = {
        DirectBasis{Exponential{2.0}, Exponential{1.0}, Ordinary{}},
        DirectBasis{Gamma{2.0, 1.5}, Uniform{0.5, 2.0}, Ordinary{}},
        DirectBasis{Uniform{0.0, 1.0}, Deterministic{1.3}, Ordinary{}},
        RiskBasis{Exponential{2.0}, Exponential{1.0}, 1.5},
        RiskBasis{Gamma{0.7, 2.0}, Gamma{3.0, 1.0}, 2.0},
    };
    std::uint64_t seed = 101;
    for (const auto& b : bases) {
        const MomentSet m = moments(b);
        const SampleMoments s = estimate(b, n, seed++);
        CHECK(std::fabs(s.mean_t - m.mu_T) < 5.0 * s.se_mean_t + 1e-9 * (1.0 + std::fabs(m.mu_T)));
        CHECK(std::fabs(s.mean_x - m.mu_X) < 5.0 * s.se_mean_x + 1e-9 * (1.0 + std::fabs(m.mu_X)));
        CHECK(std::fabs(s.var_t - m.var_T) < 0.02 * (m.var_T + 0.01));
        CHECK(std::fabs(s.var_x - m.var_X) < 0.02 * (m.var_X + 0.01));
        CHECK(std::fabs(s.cov - m.cov_XT) <
              0.02 * (std::sqrt(m.var_T * m.var_X) + 0.01));
    }
}

TEST_CASE("equilibrium first interval has mean E T^2 / (2 E T)") {
    struct Case { DistributionSpec d; double want; };
    const Case cases[] = {
        {Exponential{1.0}, 1.0},
        {Uniform{0.0, 1.0}, 1.0 / 3.0},
        {Gamma{2.0, 1.0}, 1.5},
        {Deterministic{2.0}, 1.0},
        {Uniform{0.5, 2.0}, (dist_var(Uniform{0.5, 2.0}) + 1.25 * 1.25) / 2.5},
    };
    Rng rng(7);
    for (const auto& c : cases) {
        const std::uint64_t n = 200000;
        double acc = 0.0, acc2 = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const double v = dist_sample_equilibrium(c.d, rng);
            CHECK(v >= 0.0);
            acc += v;
            acc2 += v * v;
        }
        const double mean = acc / n;
        const double se = std::sqrt((acc2 / n - mean * mean) / n);
        CHECK(std::fabs(mean - c.want) < 5.0 * se + 1e-9);
    }
}

TEST_CASE("first-interval modes only change the first draw") {
    DirectBasis d{Exponential{2.0}, Deterministic{1.0}, Equilibrium{}};
    BasisSpec b{d};
    Rng r1(5), r2(5);
    const Pair f1 = sample_first_pair(b, r1);
    CHECK(f1.t > 0.0);
    CHECK(f1.x == 1.0);
    d.first_interval = Modified{Deterministic{9.0}};
    BasisSpec bm{d};
    const Pair f2 = sample_first_pair(bm, r2);
    CHECK(f2.t == 9.0);
}

TEST_CASE("validation rejects malformed specs") {
    CHECK_THROWS_AS(dist_validate(Exponential{0.0}), DomainError);
    CHECK_THROWS_AS(dist_validate(Gamma{1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(dist_validate(Uniform{2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(basis_validate(DirectBasis{Uniform{-1.0, 1.0}, Exponential{1.0}, Ordinary{}}),
                    ModelError);
    CHECK_THROWS_AS(basis_validate(RiskBasis{Exponential{1.0}, Exponential{1.0}, 0.0}),
                    ModelError);
    CHECK_THROWS_AS(basis_validate(RiskBasis{Uniform{-0.5, 1.0}, Exponential{1.0}, 1.0}),
                    ModelError);
}

TEST_CASE("mgf and tilt") {
    CHECK(dist_mgf(Exponential{2.0}, 1.0) == doctest::Approx(2.0));
    CHECK(dist_mgf(Exponential{2.0}, -2.0) == doctest::Approx(0.5));
    CHECK(std::isinf(dist_mgf(Exponential{2.0}, 2.5)));
    CHECK(dist_mgf(Deterministic{3.0}, 0.5) == doctest::Approx(std::exp(1.5)));
    CHECK(dist_mgf(Uniform{0.0, 1.0}, 0.0) == doctest::Approx(1.0));
    CHECK(dist_mgf(Uniform{0.0, 1.0}, 1.0) == doctest::Approx(M_E - 1.0));

    const DistributionSpec t = dist_tilt(Exponential{1.0}, 0.5);
    CHECK(std::get<Exponential>(t).rate == doctest::Approx(0.5));
    const DistributionSpec g = dist_tilt(Gamma{2.0, 3.0}, 1.0);
    CHECK(std::get<Gamma>(g).rate == doctest::Approx(2.0));
    CHECK_THROWS_AS(dist_tilt(Exponential{1.0}, 1.0), ModelError);
    CHECK_THROWS_AS(dist_tilt(Uniform{0.0, 1.0}, 0.1), ModelError);
}
