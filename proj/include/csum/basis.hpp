#ifndef CSUM_BASIS_HPP
#define CSUM_BASIS_HPP

#include "csum/rng.hpp"

#include <limits>
#include <string>
#include <variant>

namespace csum {

// ---------------------------------------------------------------------------
// Component distributions
// ---------------------------------------------------------------------------

struct Exponential { double rate; };
struct Gamma       { double shape; double rate; };
struct Uniform     { double lo; double hi; };
struct Deterministic { double value; };

using DistributionSpec = std::variant<Exponential, Gamma, Uniform, Deterministic>;

double dist_mean(const DistributionSpec& d);
double dist_var(const DistributionSpec& d);
double dist_third_central(const DistributionSpec& d);
bool dist_positive_support(const DistributionSpec& d); // support within (0, inf)
double dist_sample(const DistributionSpec& d, Rng& rng);

// E exp(s V).  Finite for all s <= 0 and, on the positive side, up to the
// component's exponential-tail rate (infinite rate reported as +inf).
double dist_mgf(const DistributionSpec& d, double s);
// log E exp(s V); stays finite where dist_mgf would overflow.
double dist_log_mgf(const DistributionSpec& d, double s);
double dist_mgf_upper_limit(const DistributionSpec& d);

// Exponential tilt e^{s v} F(dv) renormalized; only families closed under
// tilting are supported (Exponential, Gamma, Deterministic).
DistributionSpec dist_tilt(const DistributionSpec& d, double s);

std::string dist_to_string(const DistributionSpec& d);
void dist_validate(const DistributionSpec& d);

// Draw from the integrated-tail (equilibrium) distribution of d:
// density (1 - F(z)) / E V on (0, inf).  Closed-form inverse for
// Exponential / Uniform / Deterministic, numeric inversion for Gamma.
double dist_sample_equilibrium(const DistributionSpec& d, Rng& rng);

// ---------------------------------------------------------------------------
// Basis of the pair (T_i, X_i)
// ---------------------------------------------------------------------------

struct Ordinary {};
struct Modified { DistributionSpec first; };
struct Equilibrium {};
using FirstIntervalMode = std::variant<Ordinary, Modified, Equilibrium>;

// Regular summation: T and X drawn independently, T supported on (0, inf).
struct DirectBasis {
    DistributionSpec t_dist;
    DistributionSpec x_dist;
    FirstIntervalMode first_interval = Ordinary{};
};

// Risk form: T_i = Y_i - c X_i with X, Y positive and independent of each
// other; the (T, X) pair is dependent through the shared X draw.
struct RiskBasis {
    DistributionSpec x_dist;
    DistributionSpec y_dist;
    double premium_c;
};

using BasisSpec = std::variant<DirectBasis, RiskBasis>;

// All scalar moments the approximation formulas consume:
// mixed central moments h(i,j) = E[(X - mu_X)^i (T - mu_T)^j], i + j <= 3.
struct MomentSet {
    double mu_T = 0, mu_X = 0;
    double var_T = 0, var_X = 0;
    double cov_XT = 0;           // h(1,1)
    double h30 = 0;              // h(3,0) = E (X - mu_X)^3
    double h21 = 0;              // h(2,1)
    double h12 = 0;              // h(1,2)
    double h03 = 0;              // h(0,3) = E (T - mu_T)^3

    double h(int i, int j) const;
};

void basis_validate(const BasisSpec& b);

// c* = E Y / E X; the proper/defective boundary of the risk form.
double critical_premium(const BasisSpec& b);

// Exact closed-form moments of the generic (stationary) pair.
MomentSet moments(const BasisSpec& b);

struct Pair { double t; double x; };

// One draw of the generic pair (T_i, X_i), i >= 2 (and i = 1 when ordinary).
Pair sample_pair(const BasisSpec& b, Rng& rng);

// One draw of the first pair (T_1, X_1), honoring the first-interval mode of
// a direct basis.  Risk bases are always ordinary.
Pair sample_first_pair(const BasisSpec& b, Rng& rng);

const RiskBasis& as_risk(const BasisSpec& b);   // throws ModelError otherwise
const DirectBasis& as_direct(const BasisSpec& b);

} // namespace csum

#endif
