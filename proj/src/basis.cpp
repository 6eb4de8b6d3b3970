#include "csum/basis.hpp"
#include "csum/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace csum {

namespace {

// Regularized lower incomplete gamma P(a, x); series for x < a + 1,
// continued fraction otherwise.
double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

void dist_validate(const DistributionSpec& d) {
    std::visit([](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            if (!(v.rate > 0.0)) throw DomainError("exponential: rate must be > 0");
        } else if constexpr (std::is_same_v<V, Gamma>) {
            if (!(v.shape > 0.0) || !(v.rate > 0.0))
                throw DomainError("gamma: shape and rate must be > 0");
        } else if constexpr (std::is_same_v<V, Uniform>) {
            if (!(v.lo < v.hi)) throw DomainError("uniform: need lo < hi");
        } else {
            if (!std::isfinite(v.value)) throw DomainError("det: non-finite value");
        }
    }, d);
}

double dist_mean(const DistributionSpec& d) {
    return std::visit([](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) return 1.0 / v.rate;
        else if constexpr (std::is_same_v<V, Gamma>)  return v.shape / v.rate;
        else if constexpr (std::is_same_v<V, Uniform>) return 0.5 * (v.lo + v.hi);
        else return v.value;
    }, d);
}

double dist_var(const DistributionSpec& d) {
    return std::visit([](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) return 1.0 / (v.rate * v.rate);
        else if constexpr (std::is_same_v<V, Gamma>)  return v.shape / (v.rate * v.rate);
        else if constexpr (std::is_same_v<V, Uniform>) {
            const double w = v.hi - v.lo;
            return w * w / 12.0;
        } else return 0.0;
    }, d);
}

double dist_third_central(const DistributionSpec& d) {
    return std::visit([](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) return 2.0 / std::pow(v.rate, 3);
        else if constexpr (std::is_same_v<V, Gamma>)  return 2.0 * v.shape / std::pow(v.rate, 3);
        else return 0.0; // Uniform and Deterministic are symmetric / degenerate
    }, d);
}

bool dist_positive_support(const DistributionSpec& d) {
    return std::visit([](const auto& v) -> bool {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Uniform>) return v.lo >= 0.0;
        else if constexpr (std::is_same_v<V, Deterministic>) return v.value > 0.0;
        else return true;
    }, d);
}

double dist_sample(const DistributionSpec& d, Rng& rng) {
    return std::visit([&rng](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            return -std::log(rng.uniform_pos()) / v.rate;
        } else if constexpr (std::is_same_v<V, Gamma>) {
            std::gamma_distribution<double> g(v.shape, 1.0 / v.rate);
            return g(rng);
        } else if constexpr (std::is_same_v<V, Uniform>) {
            return v.lo + (v.hi - v.lo) * ((rng() >> 11) * 0x1.0p-53);
        } else {
            return v.value;
        }
    }, d);
}

double dist_mgf(const DistributionSpec& d, double s) {
    return std::visit([s](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            if (s >= v.rate) return std::numeric_limits<double>::infinity();
            return v.rate / (v.rate - s);
        } else if constexpr (std::is_same_v<V, Gamma>) {
            if (s >= v.rate) return std::numeric_limits<double>::infinity();
            return std::pow(v.rate / (v.rate - s), v.shape);
        } else if constexpr (std::is_same_v<V, Uniform>) {
            if (s == 0.0) return 1.0;
            return (std::exp(s * v.hi) - std::exp(s * v.lo)) / (s * (v.hi - v.lo));
        } else {
            return std::exp(s * v.value);
        }
    }, d);
}

double dist_log_mgf(const DistributionSpec& d, double s) {
    return std::visit([s](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            if (s >= v.rate) return std::numeric_limits<double>::infinity();
            return -std::log1p(-s / v.rate);
        } else if constexpr (std::is_same_v<V, Gamma>) {
            if (s >= v.rate) return std::numeric_limits<double>::infinity();
            return -v.shape * std::log1p(-s / v.rate);
        } else if constexpr (std::is_same_v<V, Uniform>) {
            if (s == 0.0) return 0.0;
            // log[(e^{s hi} - e^{s lo}) / (s (hi - lo))] anchored at the
            // dominant endpoint to avoid overflow
            const double w = v.hi - v.lo;
            if (s > 0.0)
                return s * v.hi + std::log1p(-std::exp(-s * w)) - std::log(s * w);
            return s * v.lo + std::log1p(-std::exp(s * w)) - std::log(-s * w);
        } else {
            return s * v.value;
        }
    }, d);
}

double dist_mgf_upper_limit(const DistributionSpec& d) {
    return std::visit([](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) return v.rate;
        else if constexpr (std::is_same_v<V, Gamma>) return v.rate;
        else return std::numeric_limits<double>::infinity();
    }, d);
}

DistributionSpec dist_tilt(const DistributionSpec& d, double s) {
    return std::visit([s](const auto& v) -> DistributionSpec {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            if (v.rate - s <= 0.0) throw ModelError("dist_tilt: invalid tilt, rate - s <= 0");
            return Exponential{v.rate - s};
        } else if constexpr (std::is_same_v<V, Gamma>) {
            if (v.rate - s <= 0.0) throw ModelError("dist_tilt: invalid tilt, rate - s <= 0");
            return Gamma{v.shape, v.rate - s};
        } else if constexpr (std::is_same_v<V, Deterministic>) {
            return v; // point mass is tilt-invariant
        } else {
            throw ModelError("dist_tilt: tilted uniform is not representable");
        }
    }, d);
}

std::string dist_to_string(const DistributionSpec& d) {
    std::ostringstream os;
    std::visit([&os](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) os << "exp(" << v.rate << ")";
        else if constexpr (std::is_same_v<V, Gamma>) os << "gamma(" << v.shape << "," << v.rate << ")";
        else if constexpr (std::is_same_v<V, Uniform>) os << "uniform(" << v.lo << "," << v.hi << ")";
        else os << "det(" << v.value << ")";
    }, d);
    return os.str();
}

double dist_sample_equilibrium(const DistributionSpec& d, Rng& rng) {
    const double u = rng.uniform_pos();
    return std::visit([&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
            return -std::log(u) / v.rate; // memoryless: equilibrium = same law
        } else if constexpr (std::is_same_v<V, Deterministic>) {
            return u * v.value; // integrated tail of a point mass is Uniform(0, d)
        } else if constexpr (std::is_same_v<V, Uniform>) {
            if (v.lo < 0.0) throw DomainError("equilibrium: uniform needs lo >= 0");
            const double mu = 0.5 * (v.lo + v.hi);
            const double area = u * mu;
            if (area <= v.lo) return area;
            const double w = v.hi - v.lo;
            const double rad = w * w - 2.0 * w * (area - v.lo);
            return v.hi - std::sqrt(std::max(rad, 0.0));
        } else {
            // Gamma: F_eq(x) = (rate/shape) x (1 - P(a, rate x)) + P(a+1, rate x);
            // solved by bisection with Newton steps, density (1-F(x))/mean.
            const double a = v.shape, beta = v.rate, mean = a / beta;
            auto feq = [&](double x) {
                return (x / mean) * (1.0 - gamma_p(a, beta * x)) + gamma_p(a + 1.0, beta * x);
            };
            double lo = 0.0, hi = mean;
            while (feq(hi) < u) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e12 * mean) return hi; // u ~ 1 rounding guard
            }
            double x = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                const double fx = feq(x);
                if (fx > u) hi = x; else lo = x;
                const double dens = (1.0 - gamma_p(a, beta * x)) / mean;
                double xn = (dens > 1e-300) ? x - (fx - u) / dens : 0.5 * (lo + hi);
                if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
                if (std::fabs(xn - x) < 1e-14 * (1.0 + x)) { x = xn; break; }
                x = xn;
            }
            return x;
        }
    }, d);
}

// ---------------------------------------------------------------------------

double MomentSet::h(int i, int j) const {
    if (i == 2 && j == 0) return var_X;
    if (i == 0 && j == 2) return var_T;
    if (i == 1 && j == 1) return cov_XT;
    if (i == 3 && j == 0) return h30;
    if (i == 2 && j == 1) return h21;
    if (i == 1 && j == 2) return h12;
    if (i == 0 && j == 3) return h03;
    if (i == 1 && j == 0) return 0.0;
    if (i == 0 && j == 1) return 0.0;
    throw DomainError("MomentSet::h: only mixed central moments with i+j <= 3");
}

void basis_validate(const BasisSpec& b) {
    if (const auto* d = std::get_if<DirectBasis>(&b)) {
        dist_validate(d->t_dist);
        dist_validate(d->x_dist);
        if (!dist_positive_support(d->t_dist))
            throw ModelError("direct basis: T must be supported on (0, inf)");
        if (const auto* m = std::get_if<Modified>(&d->first_interval)) {
            dist_validate(m->first);
            if (!dist_positive_support(m->first))
                throw ModelError("modified first interval must be positive");
        }
    } else {
        const auto& r = std::get<RiskBasis>(b);
        dist_validate(r.x_dist);
        dist_validate(r.y_dist);
        if (!dist_positive_support(r.x_dist) || !dist_positive_support(r.y_dist))
            throw ModelError("risk basis: X and Y must be positive");
        if (!(r.premium_c > 0.0)) throw ModelError("risk basis: premium c must be > 0");
    }
}

double critical_premium(const BasisSpec& b) {
    const auto* r = std::get_if<RiskBasis>(&b);
    if (!r) throw ModelError("critical_premium: only defined for the risk form");
    return dist_mean(r->y_dist) / dist_mean(r->x_dist);
}

MomentSet moments(const BasisSpec& b) {
    basis_validate(b);
    MomentSet m;
    if (const auto* d = std::get_if<DirectBasis>(&b)) {
        m.mu_T = dist_mean(d->t_dist);
        m.mu_X = dist_mean(d->x_dist);
        m.var_T = dist_var(d->t_dist);
        m.var_X = dist_var(d->x_dist);
        m.cov_XT = 0.0;
        m.h30 = dist_third_central(d->x_dist);
        m.h03 = dist_third_central(d->t_dist);
        m.h21 = m.h12 = 0.0;
    } else {
        const auto& r = std::get<RiskBasis>(b);
        const double c = r.premium_c;
        const double ex = dist_mean(r.x_dist), ey = dist_mean(r.y_dist);
        const double dx = dist_var(r.x_dist), dy = dist_var(r.y_dist);
        const double m3x = dist_third_central(r.x_dist);
        const double m3y = dist_third_central(r.y_dist);
        m.mu_X = ex;
        m.mu_T = ey - c * ex;
        m.var_X = dx;
        m.var_T = dy + c * c * dx;
        m.cov_XT = -c * dx;          // E[Xc (Yc - c Xc)] with X, Y independent
        m.h30 = m3x;
        m.h21 = -c * m3x;
        m.h12 = c * c * m3x;
        m.h03 = m3y - c * c * c * m3x;
    }
    return m;
}

Pair sample_pair(const BasisSpec& b, Rng& rng) {
    if (const auto* d = std::get_if<DirectBasis>(&b)) {
        const double t = dist_sample(d->t_dist, rng);
        const double x = dist_sample(d->x_dist, rng);
        return {t, x};
    }
    const auto& r = std::get<RiskBasis>(b);
    const double x = dist_sample(r.x_dist, rng);
    const double y = dist_sample(r.y_dist, rng);
    return {y - r.premium_c * x, x};
}

Pair sample_first_pair(const BasisSpec& b, Rng& rng) {
    if (const auto* d = std::get_if<DirectBasis>(&b)) {
        if (std::holds_alternative<Ordinary>(d->first_interval))
            return sample_pair(b, rng);
        double t;
        if (const auto* mo = std::get_if<Modified>(&d->first_interval))
            t = dist_sample(mo->first, rng);
        else
            t = dist_sample_equilibrium(d->t_dist, rng);
        const double x = dist_sample(d->x_dist, rng);
        return {t, x};
    }
    return sample_pair(b, rng);
}

const RiskBasis& as_risk(const BasisSpec& b) {
    const auto* r = std::get_if<RiskBasis>(&b);
    if (!r) throw ModelError("operation requires the risk form of the basis");
    return *r;
}

const DirectBasis& as_direct(const BasisSpec& b) {
    const auto* d = std::get_if<DirectBasis>(&b);
    if (!d) throw ModelError("operation requires a direct (regular summation) basis");
    return *d;
}

} // namespace csum
