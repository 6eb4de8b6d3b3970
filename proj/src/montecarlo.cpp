#include "csum/montecarlo.hpp"
#include "csum/errors.hpp"
#include "csum/renewal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

namespace csum {

namespace {

unsigned resolve_workers(unsigned requested) {
    if (requested) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static chunking: chunk boundaries depend only on the path index, so the
// assignment of chunks to threads cannot change any result.
template <typename Fn>
void run_chunked(std::uint64_t n, unsigned workers, Fn&& per_path) {
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;
    if (workers <= 1 || n_chunks <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) per_path(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t k = next.fetch_add(1);
            if (k >= n_chunks) return;
            const std::uint64_t lo = k * kChunk;
            const std::uint64_t hi = std::min(lo + kChunk, n);
            for (std::uint64_t i = lo; i < hi; ++i) per_path(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

PathOutcome simulate_path(const BasisSpec& b, double t, std::uint64_t step_cap, Rng& rng) {
    if (!(t > 0.0)) throw DomainError("simulate_path: level t must be > 0");
    if (step_cap == 0) throw DomainError("simulate_path: step_cap must be >= 1");
    PathOutcome out;
    double v = 0.0, s = 0.0;
    double s_prev = 0.0;
    std::uint64_t last_below = 0;
    for (std::uint64_t n = 1; n <= step_cap; ++n) {
        const Pair p = (n == 1) ? sample_first_pair(b, rng) : sample_pair(b, rng);
        s_prev = s;
        v += p.t;
        s += p.x;
        if (v > t) {
            out.crossed = true;
            out.n_inf = n;
            out.s_at_inf = s;
            out.s_at_sup = s_prev;
            out.n_tsup = last_below;
            return out;
        }
        last_below = n; // v <= t here; irregular summation revisits are walked too
    }
    out.crossed = false;
    out.n_inf = kNeverCrossed;
    out.s_at_inf = std::numeric_limits<double>::quiet_NaN();
    out.s_at_sup = std::numeric_limits<double>::quiet_NaN();
    out.n_tsup = last_below;
    return out;
}

std::vector<PathOutcome> simulate_paths(const BasisSpec& b, double t, const SimConfig& cfg) {
    basis_validate(b);
    std::vector<PathOutcome> out(cfg.n_paths);
    run_chunked(cfg.n_paths, resolve_workers(cfg.workers), [&](std::uint64_t i) {
        Rng rng = Rng::for_path(cfg.seed, i);
        out[i] = simulate_path(b, t, cfg.step_cap, rng);
    });
    return out;
}

CrossingSummary crossing_summary(const std::vector<PathOutcome>& outcomes) {
    CrossingSummary s;
    s.n_paths = outcomes.size();
    for (const auto& o : outcomes) {
        if (o.crossed) ++s.n_crossed; else ++s.n_capped;
    }
    if (s.n_paths) {
        s.fraction = (double)s.n_crossed / (double)s.n_paths;
        s.std_error = std::sqrt(s.fraction * (1.0 - s.fraction) / (double)s.n_paths);
    }
    return s;
}

void write_outcomes_csv(std::ostream& os, const std::vector<PathOutcome>& outcomes) {
    os << "crossed,n_inf,s_at_inf,s_at_sup\n";
    char buf[96];
    for (const auto& o : outcomes) {
        if (o.crossed) {
            std::snprintf(buf, sizeof buf, "1,%llu,%.12g,%.12g\n",
                          (unsigned long long)o.n_inf, o.s_at_inf, o.s_at_sup);
            os << buf;
        } else {
            os << "0,inf,,\n";
        }
    }
}

// ---------------------------------------------------------------------------

EmpiricalCdf::EmpiricalCdf(std::vector<double> values, std::uint64_t n_total)
    : values_(std::move(values)), n_total_(n_total) {
    if (n_total_ == 0) throw DomainError("EmpiricalCdf: empty sample");
    if (values_.size() > n_total_)
        throw DomainError("EmpiricalCdf: more values than total mass");
    std::sort(values_.begin(), values_.end());
}

EmpiricalCdf EmpiricalCdf::from_samples(std::vector<double> samples) {
    const std::uint64_t n = samples.size();
    return EmpiricalCdf(std::move(samples), n);
}

EmpiricalCdf EmpiricalCdf::from_outcomes(const std::vector<PathOutcome>& outcomes) {
    std::vector<double> v;
    v.reserve(outcomes.size());
    for (const auto& o : outcomes)
        if (o.crossed) v.push_back(o.s_at_inf);
    return EmpiricalCdf(std::move(v), outcomes.size());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return (double)(it - values_.begin()) / (double)n_total_;
}

double EmpiricalCdf::defect() const {
    return 1.0 - (double)values_.size() / (double)n_total_;
}

double sup_distance(const EmpiricalCdf& e, const std::function<double(double)>& f,
                    const std::vector<double>& grid) {
    const auto& v = e.sorted_values();
    const double n = (double)e.size();
    double d = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i; // group ties: the step jumps from i/n to (j+1)/n at v[i]
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double fv = f(v[i]);
        d = std::max(d, std::fabs((double)(j + 1) / n - fv));
        d = std::max(d, std::fabs((double)i / n - fv));
        i = j + 1;
    }
    for (const double x : grid) d = std::max(d, std::fabs(e(x) - f(x)));
    return d;
}

// ---------------------------------------------------------------------------

LadderResult ladder_dissection(const BasisSpec& b, double t, std::uint64_t step_cap,
                               Rng& rng) {
    basis_validate(b);
    if (!(moments(b).mu_T > 0.0))
        throw RegimeError("ladder_dissection: requires E T > 0 (proper regime)");
    if (!(t > 0.0)) throw DomainError("ladder_dissection: level t must be > 0");

    LadderResult res;
    double v = 0.0, s = 0.0;
    double v_ladder = 0.0; // V at the last ladder epoch
    double bt = 0.0, bx = 0.0;
    std::uint64_t blen = 0;
    for (std::uint64_t n = 1; n <= step_cap; ++n) {
        const Pair p = (n == 1) ? sample_first_pair(b, rng) : sample_pair(b, rng);
        v += p.t;
        s += p.x;
        bt += p.t;
        bx += p.x;
        ++blen;
        if (v > v_ladder) { // strictly ascending ladder epoch
            res.blocks.push_back({bt, bx, blen});
            v_ladder = v;
            bt = bx = 0.0;
            blen = 0;
            if (v > t) { // the level is first exceeded at a ladder epoch
                res.crossed = true;
                res.s_at_inf = s;
                res.n_inf = n;
                return res;
            }
        }
    }
    res.crossed = false; // cap hit: the open block is dropped, marked by the flag
    return res;
}

// ---------------------------------------------------------------------------

namespace {

struct GarbageSetup {
    MomentSet mom;
    std::uint64_t m;
    double scale;
};

GarbageSetup garbage_setup(const BasisSpec& b, double t) {
    const DirectBasis& d = as_direct(b);
    (void)d;
    basis_validate(b);
    const MomentSet mom = moments(b);
    const double en = renewal_mean_refined(mom, t);
    if (!(en >= 1.0))
        throw DomainError("simulate_garbage: t too small, E N_sup(t) < 1");
    return {mom, (std::uint64_t)std::floor(en), garbage_scale(mom, t)};
}

double garbage_walk_path(const BasisSpec& b, double t, const GarbageSetup& g,
                         std::uint64_t step_cap, Rng& rng) {
    // continue generation to max(N_sup(t), m): record S_m and S_{N_sup}
    double v = 0.0, s = 0.0;
    double s_m = 0.0, s_nsup = 0.0;
    bool crossed = false;
    std::uint64_t n_sup = 0;
    for (std::uint64_t n = 1; n <= step_cap; ++n) {
        const Pair p = (n == 1) ? sample_first_pair(b, rng) : sample_pair(b, rng);
        if (!crossed && v + p.t > t) {
            crossed = true;
            n_sup = n - 1;
            s_nsup = s;
        }
        v += p.t;
        s += p.x;
        if (n == g.m) s_m = s;
        if (crossed && n >= g.m) break;
    }
    if (!crossed) { // cap reached; treat the cap as the count (censored path)
        n_sup = step_cap;
        s_nsup = s;
    }
    const double centered = (s_nsup - s_m) - ((double)n_sup - (double)g.m) * g.mom.mu_X;
    return g.scale * centered;
}

} // namespace

std::vector<double> simulate_garbage_generic(const BasisSpec& b, double t,
                                             const SimConfig& cfg) {
    const GarbageSetup g = garbage_setup(b, t);
    std::vector<double> out(cfg.n_paths);
    run_chunked(cfg.n_paths, resolve_workers(cfg.workers), [&](std::uint64_t i) {
        Rng rng = Rng::for_path(cfg.seed, i);
        out[i] = garbage_walk_path(b, t, g, cfg.step_cap, rng);
    });
    return out;
}

std::vector<double> simulate_garbage(const BasisSpec& b, double t, const SimConfig& cfg) {
    const GarbageSetup g = garbage_setup(b, t);
    const DirectBasis& d = as_direct(b);
    const auto* te = std::get_if<Exponential>(&d.t_dist);
    if (!te || !std::holds_alternative<Ordinary>(d.first_interval))
        return simulate_garbage_generic(b, t, cfg);

    // Exponential T: N_sup(t) is the count of a Poisson process on (0, t].
    const double lam = te->rate * t;
    std::vector<double> out(cfg.n_paths);
    run_chunked(cfg.n_paths, resolve_workers(cfg.workers), [&](std::uint64_t i) {
        Rng rng = Rng::for_path(cfg.seed, i);
        std::poisson_distribution<long long> pois(lam);
        const long long n_sup = pois(rng);
        const long long diff = n_sup - (long long)g.m;
        const std::uint64_t k = (std::uint64_t)(diff >= 0 ? diff : -diff);
        double acc = 0.0;
        for (std::uint64_t j = 0; j < k; ++j)
            acc += dist_sample(d.x_dist, rng) - g.mom.mu_X;
        out[i] = g.scale * (diff >= 0 ? acc : -acc);
    });
    return out;
}

} // namespace csum
