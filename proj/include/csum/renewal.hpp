#ifndef CSUM_RENEWAL_HPP
#define CSUM_RENEWAL_HPP

#include "csum/basis.hpp"
#include "csum/special.hpp"

namespace csum {

// Chebyshev-Hermite H2.
inline double hermite_h2(double x) { return x * x - 1.0; }

// Normal-approximation parameters of the cumulated rewards S_{N_sup(t)}:
// m_S = mu_X / mu_T, sigma_S^2 = E(mu_X T - mu_T X)^2 / mu_T^3.
struct RewardApproxParams {
    double m_s;
    double sigma_s_sq;
    double sigma_s() const;
};

// First Edgeworth polynomial Q1(x) = -(kappa30 H2(x) + 3 I1) / 6.
struct EdgeworthQ1 {
    double kappa30;
    double i1;
    double q1(double x) const { return -(kappa30 * hermite_h2(x) + 3.0 * i1) / 6.0; }
};

// E N_sup(t) ~ t / mu_T.
double renewal_mean_elementary(double mu_t, double t);

// E N_sup(t) = t/mu_T + (var_T - mu_T^2) / (2 mu_T^2) + o(1); exact at every
// t for exponential intervals (the constant vanishes and the count is Poisson).
double renewal_mean_refined(const MomentSet& mom, double t);

// Throws DegeneracyError when sigma_S^2 <= 0 (X a.s. proportional to T).
RewardApproxParams reward_params(const MomentSet& mom);

// (x - m_S t) / (sigma_S sqrt(t)).
double standardize_reward(const RewardApproxParams& p, double t, double x);

// Phi((x - m_S t)/(sigma_S sqrt(t))).
double cumulated_rewards_cdf_normal(const RewardApproxParams& p, double t, double x);

// kappa30 and I1 from the mixed central moments h(i,j), i + j <= 3.
EdgeworthQ1 edgeworth_q1(const MomentSet& mom);

// Phi(y) + Q1(y) phi(y) / sqrt(t) at y = standardize_reward(p, t, x),
// clamped to [0,1].
double cumulated_rewards_cdf_edgeworth(const RewardApproxParams& p,
                                       const EdgeworthQ1& q, double t, double x);

// Limit law of the scaled garbage term
//   G_t = S_{N_sup(t)} - S_{[E N_sup(t)]},
// scaled by mu_T^{3/4} / (sigma_X sigma_T^{1/2} t^{1/4}): the law of
// sqrt(|Z|) W with Z, W independent standard normal.
double garbage_limit_cdf(double x, const QuadratureSpec& spec = QuadratureSpec{1e-11, 1e-11, 44});
double garbage_limit_pdf(double y, const QuadratureSpec& spec = QuadratureSpec{1e-11, 1e-11, 44});

// Scaling factor applied to G_t.
double garbage_scale(const MomentSet& mom, double t);

} // namespace csum

#endif
