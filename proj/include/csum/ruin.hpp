#ifndef CSUM_RUIN_HPP
#define CSUM_RUIN_HPP

#include "csum/basis.hpp"
#include "csum/renewal.hpp"

#include <cstdint>

namespace csum {

// Normal approximation of the proper (c < c*) risk sum:
// P{S_{N_inf(t)} <= x} ~ Phi((x - m t)/(D sqrt(t))).
struct NormalApproxParams {
    double m_down;      // mu_X / mu_T
    double d_down_sq;   // E(mu_T X - mu_X T)^2 / mu_T^3
};

// Quasi-normal (Cramer-Lundberg) approximation of the defective (c > c*) sum:
// e^{kappa t} P{S <= x} ~ C Phi((x - m t)/(D sqrt(t))) in terms of the
// exponentially tilted (associated) pair.
struct QuasiNormalParams {
    double kappa;       // positive root of E e^{x T} = 1
    double cramer_c;    // constant C
    double m_up;        // mu_Xhat / mu_That
    double d_up_sq;     // E(mu_That Xhat - mu_Xhat That)^2 / mu_That^3
    bool cramer_from_spitzer = false; // true when C came from the Monte Carlo route
};

struct InverseGaussianParams {
    double m;           // M = E X / E Y
    double d_sq;        // D^2 = ((EX)^2 DY + (EY)^2 DX) / (EY)^3
    double c;
    double level_t;

    double lambda() const;            // t / (c^2 D^2)
    double inv_mu() const;            // |1 - c M|; 0 exactly at c = c*
    bool supercritical() const;       // c M > 1, i.e. c > c*
};

// Unique positive root kappa of E e^{x T} = 1, T = Y - cX; bracketing plus
// safeguarded Newton on the convex log-mgf, relative accuracy 1e-12.
// RegimeError when c <= c*; AccuracyError when the mgf diverges before a
// sign change (tail too heavy for the requested premium).
double lundberg_exponent(const BasisSpec& b);

// Exponentially tilted pair F_hat(dt,dx) = e^{kappa z} F_TX(dt,dx); for
// independent components the tilt factorizes: Y tilts by +kappa, X by
// -c kappa.  kappa = 0 returns the input unchanged.
BasisSpec associated_basis(const BasisSpec& b, double kappa);

struct SpitzerConfig {
    int n_max = 200;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
};

struct SpitzerEstimate {
    double cramer_c;
    double std_error;       // delta-method standard error of C
    double sum_pos;         // sum_n P{V_n > 0} / n      (original walk)
    double sum_nonpos;      // sum_n P{Vhat_n <= 0} / n  (tilted walk)
    double tail_bound;      // appended geometric tail estimate for both sums
    bool accuracy_warning;  // std_error above the configured threshold
};

// Monte Carlo Spitzer-sum estimate of the Cramer constant
//   C = (kappa mu_That)^{-1} exp{-sum P{V_n>0}/n - sum P{Vhat_n<=0}/n}.
SpitzerEstimate cramer_constant_spitzer(const BasisSpec& b, double kappa,
                                        const SpitzerConfig& cfg = SpitzerConfig{},
                                        double warn_threshold = 0.02);

// Full quasi-normal parameter bundle; the Cramer constant uses the
// Example-type closed form C = varrho/(c rho) when both components are
// exponential, the Spitzer route otherwise.
QuasiNormalParams quasi_normal_params(const BasisSpec& b,
                                      const SpitzerConfig& cfg = SpitzerConfig{});

NormalApproxParams normal_params(const BasisSpec& b); // RegimeError unless 0 < c < c*
double proper_cdf_normal(const NormalApproxParams& p, double t, double x);

// C e^{-kappa t} Phi((x - m t)/(D sqrt(t))); total mass C e^{-kappa t}.
double quasi_normal_cdf(const QuasiNormalParams& p, double t, double x);

InverseGaussianParams inverse_gaussian_params(const BasisSpec& b, double level_t);

// A_{M,D}(x): increment F(z+1) - F(1) of the inverse Gaussian CDF at
// z = c x / t, with mu = 1/(1 - cM), lambda = t/(c^2 D^2) below the critical
// premium and the exp(-2 lambda / mu_hat)-damped mirror form above it.  The
// two branches coincide at c = c*.
double inverse_gaussian_cdf_approx(const InverseGaussianParams& p, double x);

} // namespace csum

#endif
