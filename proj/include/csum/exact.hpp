#ifndef CSUM_EXACT_HPP
#define CSUM_EXACT_HPP

#include "csum/special.hpp"

namespace csum {

// Fully exponential risk model: X ~ Exp(varrho), Y ~ Exp(rho), T = Y - cX,
// crossing level level_t.  Ground truth for every approximation.
struct ExpModel {
    double varrho;   // rate of X
    double rho;      // rate of Y
    double c;        // premium rate
    double level_t;  // crossing level (initial capital)

    double ratio_r() const { return varrho / (c * rho); }
};

void exp_model_validate(const ExpModel& m);

// P{S_{N_inf(t)} < inf}: 1 when r >= 1, otherwise r exp(-t (c rho - varrho)/c).
double defect_mass(const ExpModel& m);

// Integrand f(z, t, x) on (0, pi) of the exact CDF representation.
double integrand_f(double z, const ExpModel& m, double x);

// P{S_{N_inf(t)} <= x} = defect_mass - (1/pi) int_0^pi f(z, t, x) dz.
// The quadrature splits (0, pi) into at least 8 panels per oscillation
// period of the cos(t rho sqrt(r) sin z + 2z) factor.
double exact_cdf(const ExpModel& m, double x,
                 const QuadratureSpec& spec = QuadratureSpec{1e-11, 1e-9, 48});

} // namespace csum

#endif
