#include "csum/renewal.hpp"
#include "csum/errors.hpp"

#include <algorithm>
#include <cmath>

namespace csum {

double RewardApproxParams::sigma_s() const { return std::sqrt(sigma_s_sq); }

double renewal_mean_elementary(double mu_t, double t) {
    if (!(mu_t > 0.0)) throw DomainError("renewal_mean_elementary: mu_T must be > 0");
    return t / mu_t;
}

double renewal_mean_refined(const MomentSet& mom, double t) {
    if (!(mom.mu_T > 0.0)) throw DomainError("renewal_mean_refined: mu_T must be > 0");
    return t / mom.mu_T + (mom.var_T - mom.mu_T * mom.mu_T) / (2.0 * mom.mu_T * mom.mu_T);
}

RewardApproxParams reward_params(const MomentSet& mom) {
    if (!(mom.mu_T > 0.0)) throw DomainError("reward_params: mu_T must be > 0");
    const double mu_t = mom.mu_T, mu_x = mom.mu_X;
    const double num = mu_x * mu_x * mom.var_T - 2.0 * mu_x * mu_t * mom.cov_XT +
                       mu_t * mu_t * mom.var_X;
    const double sigma_sq = num / (mu_t * mu_t * mu_t);
    const double scale = (mu_x * mu_x * mom.var_T + mu_t * mu_t * mom.var_X) /
                         (mu_t * mu_t * mu_t);
    if (!(sigma_sq > 1e-12 * std::max(scale, 1e-300)))
        throw DegeneracyError("reward_params: sigma_S^2 <= 0, X proportional to T");
    return {mu_x / mu_t, sigma_sq};
}

double standardize_reward(const RewardApproxParams& p, double t, double x) {
    if (!(t > 0.0)) throw DomainError("standardize_reward: t must be > 0");
    return (x - p.m_s * t) / (p.sigma_s() * std::sqrt(t));
}

double cumulated_rewards_cdf_normal(const RewardApproxParams& p, double t, double x) {
    return std_normal_cdf(standardize_reward(p, t, x));
}

EdgeworthQ1 edgeworth_q1(const MomentSet& mom) {
    const RewardApproxParams p = reward_params(mom); // shares the degeneracy check
    const double muT = mom.mu_T, muX = mom.mu_X;
    const double vT = mom.var_T, vX = mom.var_X, k = mom.cov_XT;
    const double sS = p.sigma_s();

    const double g1 = (mom.h30 - 3.0 * vX * k / muT + 6.0 * vX * vT * muX / (muT * muT) -
                       6.0 * vT * k * muX * muX / (muT * muT * muT)) / muT;
    const double g2 = -3.0 * (mom.h21 - 2.0 * k * k / muT + vX * vT / muT) * muX / (muT * muT);
    const double g3 = 3.0 * (mom.h12 - vT * k / muT) * muX * muX / (muT * muT * muT);
    const double g4 = -(mom.h03 - 3.0 * vT * vT / muT) * std::pow(muX, 3) / std::pow(muT, 4);
    const double kappa30 = (g1 + g2 + g3 + g4) / (sS * sS * sS);

    // Constant term: twice the asymptotic mean excess of S_{N_sup(t)} over
    // m_S t, divided by sigma_S.  The excess is mu_X (var_T - mu_T^2)/(2 mu_T^2)
    // from the refined renewal expansion of E N_inf, minus cov_XT / mu_T for
    // the length-biased summand removed at the boundary.
    const double i1 = (muX * (vT / (muT * muT) - 1.0) - 2.0 * k / muT) / sS;
    return {kappa30, i1};
}

double cumulated_rewards_cdf_edgeworth(const RewardApproxParams& p,
                                       const EdgeworthQ1& q, double t, double x) {
    const double y = standardize_reward(p, t, x);
    const double v = std_normal_cdf(y) + q.q1(y) * std_normal_pdf(y) / std::sqrt(t);
    return std::clamp(v, 0.0, 1.0);
}

namespace {

// Mixture integrals over z in [-8, 8]; substituting z = w^2 removes the
// z^{-1/2} endpoint singularity of the density.  Mass beyond |z| = 8 is
// 2 Phi(-8) ~ 1.2e-15, below every tolerance used here.
constexpr double kWMax = 2.8284271247461903; // sqrt(8)

} // namespace

double garbage_limit_cdf(double x, const QuadratureSpec& spec) {
    if (!std::isfinite(x)) throw DomainError("garbage_limit_cdf: non-finite argument");
    auto f = [x](double w) {
        if (w == 0.0) return 0.0;
        return 4.0 * w * std_normal_cdf(x / w) * std_normal_pdf(w * w);
    };
    const double tail = std_normal_cdf(-8.0); // bound on the discarded mixture mass
    return integrate(f, 0.0, kWMax, spec) + tail;
}

double garbage_limit_pdf(double y, const QuadratureSpec& spec) {
    if (!std::isfinite(y)) throw DomainError("garbage_limit_pdf: non-finite argument");
    auto f = [y](double w) {
        if (w == 0.0)
            return y == 0.0 ? 4.0 * std_normal_pdf(0.0) * std_normal_pdf(0.0) : 0.0;
        return 4.0 * std_normal_pdf(y / w) * std_normal_pdf(w * w);
    };
    return integrate(f, 0.0, kWMax, spec);
}

double garbage_scale(const MomentSet& mom, double t) {
    if (!(mom.mu_T > 0.0) || !(t > 0.0))
        throw DomainError("garbage_scale: need mu_T > 0 and t > 0");
    if (!(mom.var_X > 0.0))
        throw DomainError("garbage_scale: sigma_X must be positive");
    return std::pow(mom.mu_T, 0.75) /
           (std::sqrt(mom.var_X) * std::pow(mom.var_T, 0.25) * std::pow(t, 0.25));
}

} // namespace csum
