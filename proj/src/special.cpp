#include "csum/special.hpp"
#include "csum/errors.hpp"

#include <cmath>
#include <limits>

namespace csum {

double std_normal_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("std_normal_cdf: non-finite argument");
    // erfc is accurate in both tails; 0.5*erfc(-x/sqrt(2)) keeps relative
    // accuracy for x << 0 where 1 - Phi(-x) would cancel.
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double std_normal_pdf(double x) {
    if (!std::isfinite(x)) throw DomainError("std_normal_pdf: non-finite argument");
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double log_std_normal_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("log_std_normal_cdf: non-finite argument");
    if (x > -37.0) {
        double p = 0.5 * std::erfc(-x * M_SQRT1_2);
        if (p > 0.0) return std::log(p);
    }
    // Tail expansion: Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...), x << 0.
    const double x2 = x * x;
    double term = 1.0, series = 1.0, sign = -1.0, num = 1.0;
    for (int k = 1; k <= 8; ++k) {
        num *= (2.0 * k - 1.0);
        term = num / std::pow(x2, k);
        series += sign * term;
        sign = -sign;
    }
    return -0.5 * x2 - 0.5 * std::log(2.0 * M_PI) - std::log(-x) + std::log(series);
}

double inv_gaussian_cdf(double z, double inv_mean, double shape) {
    if (!(z > 0.0)) throw DomainError("inv_gaussian_cdf: z must be positive");
    if (!(shape > 0.0)) throw DomainError("inv_gaussian_cdf: shape must be positive");
    if (inv_mean < 0.0) throw DomainError("inv_gaussian_cdf: inv_mean must be >= 0");
    const double a = std::sqrt(shape / z);
    if (inv_mean == 0.0) return 2.0 * std_normal_cdf(-a);
    const double t1 = std_normal_cdf(a * (z * inv_mean - 1.0));
    const double t2 = std::exp(2.0 * shape * inv_mean +
                               log_std_normal_cdf(-a * (z * inv_mean + 1.0)));
    double v = t1 + t2;
    return v < 1.0 ? v : 1.0;
}

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    double tol;
    int max_depth;
    int min_depth; // forced subdivision so oscillations cannot alias the nodes
    bool converged = true;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.f(lm), frm = st.f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const bool settled = std::fabs(delta) <= 15.0 * tol && depth >= st.min_depth;
    if (settled || depth >= st.max_depth) {
        if (std::fabs(delta) > 15.0 * tol) st.converged = false;
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate: need finite a < b");
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_depth < 1)
        throw DomainError("integrate: invalid QuadratureSpec");
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(whole));
    SimpsonState st{f, tol, spec.max_depth, std::min(5, spec.max_depth)};
    const double v = simpson_rec(st, a, b, fa, fm, fb, whole, tol, 0);
    if (!st.converged)
        throw AccuracyError("integrate: max_depth reached before tolerance", v);
    return v;
}

} // namespace csum
