#ifndef CSUM_SPECIAL_HPP
#define CSUM_SPECIAL_HPP

#include <functional>

namespace csum {

// Gamma(1/4), used by the garbage limit density peak Gamma(1/4)/(2^{3/4} pi).
inline constexpr double kGammaQuarter = 3.6256099082219083119306851558676720029;

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 40;
};

// Standard normal CDF, absolute error below 1e-12.
double std_normal_cdf(double x);

// Standard normal density (2 pi)^{-1/2} exp(-x^2/2).
double std_normal_pdf(double x);

// log of the standard normal CDF; stays finite far into the left tail,
// where Phi itself underflows (asymptotic tail expansion below x = -37).
double log_std_normal_cdf(double x);

// Inverse Gaussian CDF
//   F(z; mu, lambda) = Phi(sqrt(lambda/z)(z/mu - 1))
//                      + exp(2 lambda/mu) Phi(-sqrt(lambda/z)(z/mu + 1)),
// parameterized by the inverse mean inv_mean = 1/mu >= 0 so that mu = infinity
// is a regular input (inv_mean = 0 gives 2 Phi(-sqrt(lambda/z))).  The
// exp * Phi product is evaluated in log space; it overflows otherwise for
// large lambda/mu while the true value is moderate.
double inv_gaussian_cdf(double z, double inv_mean, double shape);

// Adaptive Simpson integration of f over [a,b].  Error target
// max(abs_tol, rel_tol * |result|); throws AccuracyError carrying the best
// estimate if max_depth subdivisions are not enough.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = QuadratureSpec{});

} // namespace csum

#endif
