#ifndef CSUM_MONTECARLO_HPP
#define CSUM_MONTECARLO_HPP

#include "csum/basis.hpp"
#include "csum/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace csum {

struct SimConfig {
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
    std::uint64_t step_cap = 1000000;
    unsigned workers = 0; // 0 = all hardware threads
};

inline constexpr std::uint64_t kNeverCrossed = ~std::uint64_t{0};

// One path of the walk V_n = sum T_i, S_n = sum X_i up to the first crossing
// of the level t (or the step cap).  N_sup = N_inf - 1 for regular summation;
// n_tsup is the last walked index with V_n <= t.
struct PathOutcome {
    bool crossed = false;
    std::uint64_t n_inf = kNeverCrossed;
    double s_at_inf = 0;  // S_{N_inf(t)}, NaN when not crossed
    double s_at_sup = 0;  // S_{N_inf(t)-1}, NaN when not crossed
    std::uint64_t n_tsup = 0;
};

PathOutcome simulate_path(const BasisSpec& b, double t, std::uint64_t step_cap, Rng& rng);

// Path i always uses the stream derived from (seed, i): results are
// bit-identical for any worker count.
std::vector<PathOutcome> simulate_paths(const BasisSpec& b, double t, const SimConfig& cfg);

struct CrossingSummary {
    std::uint64_t n_paths = 0;
    std::uint64_t n_crossed = 0;
    std::uint64_t n_capped = 0;   // paths stopped by step_cap (possible censoring)
    double fraction = 0;
    double std_error = 0;         // binomial
};
CrossingSummary crossing_summary(const std::vector<PathOutcome>& outcomes);

// crossed,n_inf,s_at_inf,s_at_sup per row ("inf" for the never-crossed marker).
void write_outcomes_csv(std::ostream& os, const std::vector<PathOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Empirical CDF with defect mass
// ---------------------------------------------------------------------------

class EmpiricalCdf {
public:
    // finite sample values plus (n_total - values.size()) mass at +infinity
    EmpiricalCdf(std::vector<double> values, std::uint64_t n_total);

    static EmpiricalCdf from_samples(std::vector<double> samples);
    // crossed paths contribute s_at_inf, uncrossed paths the defect mass
    static EmpiricalCdf from_outcomes(const std::vector<PathOutcome>& outcomes);

    double operator()(double x) const;
    double defect() const;
    std::uint64_t size() const { return n_total_; }
    const std::vector<double>& sorted_values() const { return values_; }

private:
    std::vector<double> values_;
    std::uint64_t n_total_;
};

// Exact sup over all sample jump points, plus any supplied grid points.
double sup_distance(const EmpiricalCdf& e, const std::function<double(double)>& f,
                    const std::vector<double>& grid = {});

// ---------------------------------------------------------------------------
// Blackwell (ladder) dissection
// ---------------------------------------------------------------------------

struct LadderBlock {
    double t_bar;          // V increment across the block, positive
    double x_bar;          // S increment across the block
    std::uint64_t length;  // nu_k - nu_{k-1}
};

struct LadderResult {
    std::vector<LadderBlock> blocks; // complete blocks; the last one crosses t
    bool crossed = false;            // false: step cap hit inside a block
    double s_at_inf = 0;             // S at the crossing ladder epoch
    std::uint64_t n_inf = kNeverCrossed;
};

// Strictly ascending ladder epochs of one path.  Requires E T > 0.
LadderResult ladder_dissection(const BasisSpec& b, double t, std::uint64_t step_cap,
                               Rng& rng);

// ---------------------------------------------------------------------------
// Garbage term
// ---------------------------------------------------------------------------

// Scaled samples of the garbage term
//   G_t = sum_{m < i <= N_sup(t)} (X_i - mu_X)   (sign flipped when N_sup < m),
// m = [E N_sup(t)] from the refined renewal expansion, scaled by
// mu_T^{3/4} / (sigma_X sigma_T^{1/2} t^{1/4}).  Direct bases only.
// For exponential T with an ordinary first interval the renewal count is
// drawn exactly as Poisson(rate * t) instead of walking 10^6 steps per path;
// the law of the output is identical.
std::vector<double> simulate_garbage(const BasisSpec& b, double t, const SimConfig& cfg);

// exposed for the equivalence test between the generic walk and the fast path
std::vector<double> simulate_garbage_generic(const BasisSpec& b, double t,
                                             const SimConfig& cfg);

} // namespace csum

#endif
