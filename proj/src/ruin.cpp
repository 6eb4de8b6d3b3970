#include "csum/ruin.hpp"
#include "csum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace csum {

namespace {

// d/ds log E e^{sV} (the mean of the s-tilted distribution).
double dist_log_mgf_deriv(const DistributionSpec& d, double s) {
    return std::visit([s](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            return 1.0 / (v.rate - s);
        } else if constexpr (std::is_same_v<V, Gamma>) {
            return v.shape / (v.rate - s);
        } else if constexpr (std::is_same_v<V, Uniform>) {
            if (std::fabs(s) < 1e-8) {
                // series around 0: mean + s var + O(s^2)
                const double w = v.hi - v.lo;
                return 0.5 * (v.lo + v.hi) + s * w * w / 12.0;
            }
            const double eh = std::exp(s * v.hi), el = std::exp(s * v.lo);
            return (v.hi * eh - v.lo * el) / (eh - el) - 1.0 / s;
        } else {
            return v.value;
        }
    }, d);
}

double log_mgf_T(const RiskBasis& r, double s) {
    const double ly = dist_log_mgf(r.y_dist, s);
    const double lx = dist_log_mgf(r.x_dist, -r.premium_c * s);
    if (!std::isfinite(ly)) return std::numeric_limits<double>::infinity();
    return ly + lx;
}

double log_mgf_T_deriv(const RiskBasis& r, double s) {
    return dist_log_mgf_deriv(r.y_dist, s) -
           r.premium_c * dist_log_mgf_deriv(r.x_dist, -r.premium_c * s);
}

} // namespace

double lundberg_exponent(const BasisSpec& b) {
    const RiskBasis& r = as_risk(b);
    basis_validate(b);
    const double cstar = critical_premium(b);
    if (r.premium_c <= cstar)
        throw RegimeError("lundberg_exponent: c <= c* (proper regime, no positive root)");

    const double s_max = dist_mgf_upper_limit(r.y_dist);

    // Bracket the root of g(s) = log E e^{sT}: g(0) = 0, g'(0) = E T < 0,
    // g convex, so the positive root is where g crosses back up through 0.
    double lo = 1e-14;
    double hi;
    if (std::isfinite(s_max)) {
        hi = s_max * (1.0 - 1e-13);
        if (log_mgf_T(r, hi) <= 0.0)
            throw AccuracyError("lundberg_exponent: mgf domain exhausted before sign change", hi);
    } else {
        hi = 1.0;
        while (log_mgf_T(r, hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 1e12)
                throw AccuracyError("lundberg_exponent: no sign change found", hi);
        }
    }

    // Safeguarded Newton on the bracket.
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double g = log_mgf_T(r, s);
        if (std::isfinite(g)) {
            if (g > 0.0) hi = s; else lo = s;
        } else {
            hi = s;
        }
        double sn = s - (std::isfinite(g) ? g / log_mgf_T_deriv(r, s) : 0.0);
        if (!(sn > lo && sn < hi) || !std::isfinite(sn)) sn = 0.5 * (lo + hi);
        if (std::fabs(sn - s) <= 1e-13 * s) { s = sn; break; }
        s = sn;
    }
    return s;
}

BasisSpec associated_basis(const BasisSpec& b, double kappa) {
    const RiskBasis& r = as_risk(b);
    if (kappa < 0.0) throw DomainError("associated_basis: kappa must be >= 0");
    if (kappa == 0.0) return b;
    RiskBasis t;
    t.y_dist = dist_tilt(r.y_dist, kappa);
    t.x_dist = dist_tilt(r.x_dist, -r.premium_c * kappa);
    t.premium_c = r.premium_c;
    return t;
}

SpitzerEstimate cramer_constant_spitzer(const BasisSpec& b, double kappa,
                                        const SpitzerConfig& cfg,
                                        double warn_threshold) {
    const RiskBasis& orig = as_risk(b);
    const BasisSpec assoc = associated_basis(b, kappa);
    const RiskBasis& tilt = as_risk(assoc);
    const MomentSet amom = moments(assoc);
    if (!(amom.mu_T > 0.0))
        throw RegimeError("cramer_constant_spitzer: tilted walk has non-positive drift");

    const int n_max = cfg.n_max;
    const auto n_paths = cfg.n_paths;
    std::vector<double> inv_n(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) inv_n[n] = 1.0 / n;

    // One pass per walk: path i accumulates its own sum_n 1{..}/n, so the
    // standard error of the Spitzer sum comes straight from the per-path
    // spread, correlations across n included.
    std::vector<std::uint64_t> cnt_pos(n_max + 1, 0), cnt_nonpos(n_max + 1, 0);
    auto walk_sum = [&](const RiskBasis& rb, bool count_positive, std::uint64_t path,
                        std::vector<std::uint64_t>& counts) {
        Rng rng = Rng::for_path(cfg.seed, path);
        double v = 0.0, acc = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            const double x = dist_sample(rb.x_dist, rng);
            const double y = dist_sample(rb.y_dist, rng);
            v += y - rb.premium_c * x;
            const bool hit = count_positive ? (v > 0.0) : (v <= 0.0);
            if (hit) {
                acc += inv_n[n];
                ++counts[n];
            }
        }
        return acc;
    };

    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        const double a = walk_sum(orig, true, i, cnt_pos);
        s1 += a; s1sq += a * a;
        const double q = walk_sum(tilt, false, i + n_paths, cnt_nonpos);
        s2 += q; s2sq += q * q;
    }
    const double m1 = s1 / n_paths, m2 = s2 / n_paths;
    const double se1 = std::sqrt(std::max(s1sq / n_paths - m1 * m1, 0.0) / n_paths);
    const double se2 = std::sqrt(std::max(s2sq / n_paths - m2 * m2, 0.0) / n_paths);

    // Geometric tail appended beyond n_max, fitted on windowed averages of
    // the per-n frequencies.
    auto tail_of = [&](const std::vector<std::uint64_t>& counts) {
        const int w = std::max(4, n_max / 20);
        double pa = 0.0, pb = 0.0;
        for (int n = n_max / 2 - w + 1; n <= n_max / 2; ++n) pa += (double)counts[n];
        for (int n = n_max - w + 1; n <= n_max; ++n) pb += (double)counts[n];
        pa /= (double)w * n_paths;
        pb /= (double)w * n_paths;
        if (pb <= 0.0 || pa <= pb) return 0.0;
        const double g = std::pow(pb / pa, 1.0 / (n_max / 2.0));
        return pb * g / (1.0 - g) / n_max;
    };
    const double tail = tail_of(cnt_pos) + tail_of(cnt_nonpos);

    SpitzerEstimate est;
    est.sum_pos = m1;
    est.sum_nonpos = m2;
    est.tail_bound = tail;
    est.cramer_c = std::exp(-(m1 + m2 + tail)) / (kappa * amom.mu_T);
    est.std_error = est.cramer_c * std::sqrt(se1 * se1 + se2 * se2);
    est.accuracy_warning = est.std_error > warn_threshold;
    return est;
}

QuasiNormalParams quasi_normal_params(const BasisSpec& b, const SpitzerConfig& cfg) {
    const RiskBasis& r = as_risk(b);
    const double kappa = lundberg_exponent(b);
    const BasisSpec assoc = associated_basis(b, kappa);
    const MomentSet amom = moments(assoc);
    const RewardApproxParams rp = reward_params(amom);

    QuasiNormalParams p;
    p.kappa = kappa;
    p.m_up = rp.m_s;
    p.d_up_sq = rp.sigma_s_sq;

    const auto* xe = std::get_if<Exponential>(&r.x_dist);
    const auto* ye = std::get_if<Exponential>(&r.y_dist);
    if (xe && ye) {
        p.cramer_c = xe->rate / (r.premium_c * ye->rate);
        p.cramer_from_spitzer = false;
    } else {
        p.cramer_c = cramer_constant_spitzer(b, kappa, cfg).cramer_c;
        p.cramer_from_spitzer = true;
    }
    return p;
}

NormalApproxParams normal_params(const BasisSpec& b) {
    const RiskBasis& r = as_risk(b);
    const double cstar = critical_premium(b);
    if (!(r.premium_c < cstar))
        throw RegimeError("normal_params: requires the proper regime 0 < c < c*");
    const MomentSet m = moments(b);
    const RewardApproxParams rp = reward_params(m);
    return {rp.m_s, rp.sigma_s_sq};
}

double proper_cdf_normal(const NormalApproxParams& p, double t, double x) {
    if (!(t > 0.0)) throw DomainError("proper_cdf_normal: t must be > 0");
    return std_normal_cdf((x - p.m_down * t) / std::sqrt(p.d_down_sq * t));
}

double quasi_normal_cdf(const QuasiNormalParams& p, double t, double x) {
    if (!(t > 0.0)) throw DomainError("quasi_normal_cdf: t must be > 0");
    const double y = (x - p.m_up * t) / std::sqrt(p.d_up_sq * t);
    return p.cramer_c * std::exp(-p.kappa * t + log_std_normal_cdf(y));
}

double InverseGaussianParams::lambda() const { return level_t / (c * c * d_sq); }
double InverseGaussianParams::inv_mu() const { return std::fabs(1.0 - c * m); }
bool InverseGaussianParams::supercritical() const { return c * m > 1.0; }

InverseGaussianParams inverse_gaussian_params(const BasisSpec& b, double level_t) {
    const RiskBasis& r = as_risk(b);
    basis_validate(b);
    if (!(level_t > 0.0)) throw DomainError("inverse_gaussian_params: level must be > 0");
    const double ex = dist_mean(r.x_dist), ey = dist_mean(r.y_dist);
    const double dx = dist_var(r.x_dist), dy = dist_var(r.y_dist);
    InverseGaussianParams p;
    p.m = ex / ey;
    p.d_sq = (ex * ex * dy + ey * ey * dx) / (ey * ey * ey);
    p.c = r.premium_c;
    p.level_t = level_t;
    if (!(p.d_sq > 0.0))
        throw DegeneracyError("inverse_gaussian_params: D^2 must be positive");
    return p;
}

double inverse_gaussian_cdf_approx(const InverseGaussianParams& p, double x) {
    if (!(x > 0.0)) throw DomainError("inverse_gaussian_cdf_approx: x must be > 0");
    const double z = p.c * x / p.level_t;
    const double lam = p.lambda();
    const double nu = p.inv_mu();
    double v;
    if (!p.supercritical()) {
        v = inv_gaussian_cdf(z + 1.0, nu, lam) - inv_gaussian_cdf(1.0, nu, lam);
    } else {
        // exp(-2 lambda nu) F(w; 1/nu, lambda): the damping cancels the
        // exploding exp(2 lambda nu) inside F, so expand and keep both
        // pieces in log space.
        auto term = [&](double w) {
            const double a = std::sqrt(lam / w);
            return std::exp(-2.0 * lam * nu + log_std_normal_cdf(a * (w * nu - 1.0))) +
                   std_normal_cdf(-a * (w * nu + 1.0));
        };
        v = term(z + 1.0) - term(1.0);
    }
    return std::clamp(v, 0.0, 1.0);
}

} // namespace csum
