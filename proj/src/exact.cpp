#include "csum/exact.hpp"
#include "csum/errors.hpp"

#include <algorithm>
#include <cmath>

namespace csum {

void exp_model_validate(const ExpModel& m) {
    // level_t = 0 is admitted so the t -> 0 limit of the defect is a plain call
    if (!(m.varrho > 0.0) || !(m.rho > 0.0) || !(m.c > 0.0) || !(m.level_t >= 0.0))
        throw DomainError("ExpModel: rates and premium must be strictly positive");
}

double defect_mass(const ExpModel& m) {
    exp_model_validate(m);
    const double r = m.ratio_r();
    if (r >= 1.0) return 1.0;
    return r * std::exp(-m.level_t * (m.c * m.rho - m.varrho) / m.c);
}

double integrand_f(double z, const ExpModel& m, double x) {
    const double r = m.ratio_r();
    const double sr = std::sqrt(r);
    const double trho = m.level_t * m.rho;
    if (z == 0.0) {
        // cos difference vanishes like 2(t rho sqrt(r)+1) z^2 next to the
        // denominator (1-sqrt(r))^2 + sqrt(r) z^2: zero limit unless r = 1.
        const double gap = 1.0 - sr;
        return gap * gap > 0.0 ? 0.0 : 2.0 * (trho + 1.0);
    }
    const double cz = std::cos(z), sz = std::sin(z);
    const double shalf = std::sin(0.5 * z);
    // 1 + r - 2 sqrt(r) cos z, written without cancellation near z = 0
    const double denom = (1.0 - sr) * (1.0 - sr) + 4.0 * sr * shalf * shalf;
    const double expo = trho * (sr * cz - 1.0) - x * m.c * m.rho * denom;
    const double phase = trho * sr * sz;
    // cos(phase) - cos(phase + 2z) = 2 sin(phase + z) sin(z)
    return r / denom * std::exp(expo) * 2.0 * std::sin(phase + z) * sz;
}

double exact_cdf(const ExpModel& m, double x, const QuadratureSpec& spec) {
    exp_model_validate(m);
    if (!(x > 0.0)) throw DomainError("exact_cdf: x must be positive");

    const double r = m.ratio_r();
    const double sr = std::sqrt(r);
    const double osc = m.level_t * m.rho * sr; // phase swing of the cosines
    const int panels = std::max(16, (int)std::ceil(8.0 * (osc + 2.0 * M_PI) / (2.0 * M_PI)));

    // In the proper regime (r > 1) the integrand peaks at exp(t rho (sqrt(r)-1));
    // the achievable absolute accuracy is bounded by round-off on the mass of
    // |f|, roughly peak height times the Laplace width sqrt(2 pi / osc).
    const double gap = (1.0 - sr) * (1.0 - sr);
    const double envelope = 2.0 * std::exp(std::max(0.0, m.level_t * m.rho * (sr - 1.0))) *
                            (gap > 1e-16 ? r / gap : osc + 1.0);
    const double mass = envelope * std::min(M_PI, std::sqrt(2.0 * M_PI / std::max(osc, 1.0)));
    const double roundoff_floor = mass * 1e-13;
    if (roundoff_floor > 1e-5)
        throw AccuracyError(
            "exact_cdf: oscillatory cancellation exceeds double precision at this level",
            roundoff_floor);

    QuadratureSpec panel_spec = spec;
    panel_spec.abs_tol = std::max(spec.abs_tol / panels, envelope * 3e-15);

    auto f = [&](double z) { return integrand_f(z, m, x); };
    double integral = 0.0;
    bool degraded = false;
    double lo = 0.0;
    for (int k = 1; k <= panels; ++k) {
        const double hi = M_PI * k / panels;
        try {
            integral += integrate(f, lo, hi, panel_spec);
        } catch (const AccuracyError& e) {
            integral += e.best_estimate;
            degraded = true;
        }
        lo = hi;
    }

    double v = defect_mass(m) - integral / M_PI;
    if (degraded)
        throw AccuracyError("exact_cdf: quadrature tolerance not reached", v);

    // Round-off can push the value a hair past [0, 1]; anything further out
    // means the transcription or quadrature is broken.
    const double slack = 1e3 * spec.abs_tol + 1e3 * roundoff_floor + 1e-12;
    if (v < -slack || v > 1.0 + slack)
        throw AccuracyError("exact_cdf: value outside [0,1] beyond tolerance", v);
    return std::clamp(v, 0.0, 1.0);
}

} // namespace csum
