#include "csum/modular.hpp"
#include "csum/errors.hpp"

#include <cmath>
#include <cstring>

namespace csum {

namespace {

int pick_next(const MarkovModulatedBasis& b, int from, Rng& rng) {
    const double u = rng.uniform_pos();
    double acc = 0.0;
    for (int j = 0; j < b.n_states; ++j) {
        acc += b.p(from, j);
        if (u <= acc) return j;
    }
    return b.n_states - 1; // row rounding
}

} // namespace

void modulated_validate(const MarkovModulatedBasis& b) {
    const int n = b.n_states;
    if (n < 1) throw ModelError("modulated basis: need at least one state");
    if ((int)b.transition.size() != n * n || (int)b.t_dists.size() != n * n ||
        (int)b.x_dists.size() != n * n)
        throw ModelError("modulated basis: matrix sizes do not match n_states");
    if (b.initial_state < 0 || b.initial_state >= n || b.reference_state < 0 ||
        b.reference_state >= n)
        throw ModelError("modulated basis: state index out of range");
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double pij = b.p(i, j);
            if (pij < 0.0) throw ModelError("modulated basis: negative transition probability");
            row += pij;
            dist_validate(b.t_dist(i, j));
            dist_validate(b.x_dist(i, j));
            if (pij > 0.0 && !dist_positive_support(b.t_dist(i, j)))
                throw ModelError("modulated basis: T must be supported on (0, inf)");
        }
        if (std::fabs(row - 1.0) > 1e-9)
            throw ModelError("modulated basis: transition row does not sum to 1");
    }
    // irreducibility: boolean transitive closure over positive entries
    std::vector<char> reach(n * (std::size_t)n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) reach[i * n + j] = b.p(i, j) > 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (reach[i * n + k] && reach[k * n + j]) reach[i * n + j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!reach[i * n + j])
                throw ModelError("modulated basis: chain is not irreducible");
}

std::vector<double> stationary_distribution(const MarkovModulatedBasis& b) {
    modulated_validate(b);
    const int n = b.n_states;
    // solve pi (P - I) = 0 with the normalization sum pi = 1:
    // columns of A are (P - I)^T rows, last equation replaced by sum = 1.
    std::vector<double> a(n * (std::size_t)n), rhs(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i * n + j] = b.p(j, i) - (i == j ? 1.0 : 0.0);
    for (int j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
    rhs[n - 1] = 1.0;
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-14)
            throw ModelError("stationary_distribution: singular system");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double fr = a[r * n + col] / a[col * n + col];
            if (fr == 0.0) continue;
            for (int j = col; j < n; ++j) a[r * n + j] -= fr * a[col * n + j];
            rhs[r] -= fr * rhs[col];
        }
    }
    std::vector<double> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = rhs[i] / a[i * n + i];
    return pi;
}

void BlockStats::correlation_q(double q[3][3]) const {
    q[0][0] = q[1][1] = q[2][2] = 1.0;
    q[0][1] = q[1][0] = corr_xt;
    q[0][2] = q[2][0] = corr_xtau;
    q[1][2] = q[2][1] = corr_ttau;
}

namespace {

BlockStats finalize_stats(const BlockTriple& block0, std::uint64_t n,
                          const double sum1[3], const double sum2[3][3],
                          const double lag_sums[2][3], const double pow_sums[5][5],
                          std::vector<BlockTriple> kept) {
    if (n < 2) throw ModelError("extract_blocks: need at least 2 stationary blocks");
    BlockStats s;
    s.block0 = block0;
    s.n_blocks = n;
    const double dn = (double)n;
    const double m[3] = {sum1[0] / dn, sum1[1] / dn, sum1[2] / dn}; // tau, T, X
    s.mu_tau = m[0];
    s.mu_t = m[1];
    s.mu_x = m[2];
    auto cmom = [&](int i, int j) { return sum2[i][j] / dn - m[i] * m[j]; };
    s.var_tau = cmom(0, 0);
    s.var_t = cmom(1, 1);
    s.var_x = cmom(2, 2);
    s.cov_ttau = cmom(1, 0);
    s.cov_xtau = cmom(2, 0);
    s.cov_xt = cmom(2, 1);

    auto corr = [](double c, double va, double vb) {
        const double d = std::sqrt(va * vb);
        return d > 0.0 ? c / d : 0.0;
    };
    s.corr_xt = corr(s.cov_xt, s.var_x, s.var_t);
    s.corr_xtau = corr(s.cov_xtau, s.var_x, s.var_tau);
    s.corr_ttau = corr(s.cov_ttau, s.var_t, s.var_tau);

    // Rank check over the coordinates that actually vary.  A constant block
    // length (single-state chain) drops tau; if neither T nor X varies the
    // matrix is singular outright.
    const bool vx = s.var_x > 0.0, vt = s.var_t > 0.0, vtau = s.var_tau > 0.0;
    if (vx && vt && vtau) {
        s.det_q = 1.0 + 2.0 * s.corr_xt * s.corr_xtau * s.corr_ttau -
                  s.corr_xt * s.corr_xt - s.corr_xtau * s.corr_xtau -
                  s.corr_ttau * s.corr_ttau;
    } else if (vx && vt) {
        s.det_q = 1.0 - s.corr_xt * s.corr_xt;
    } else if ((vx && vtau)) {
        s.det_q = 1.0 - s.corr_xtau * s.corr_xtau;
    } else if (vt && vtau) {
        s.det_q = 1.0 - s.corr_ttau * s.corr_ttau;
    } else {
        s.det_q = 0.0;
    }

    // lag-1 sample correlations over n-1 consecutive pairs (T and X)
    const double dn1 = dn - 1.0;
    for (int which = 0; which < 2; ++which) {
        const int idx = which + 1; // 1 = T, 2 = X
        const double mean = m[idx];
        const double num = lag_sums[which][0] / dn1 - mean * (lag_sums[which][1] / dn1) -
                           mean * (lag_sums[which][2] / dn1) + mean * mean;
        const double den = (idx == 1 ? s.var_t : s.var_x);
        const double r = den > 0.0 ? num / den : 0.0;
        if (which == 0) s.lag1_corr_t = r; else s.lag1_corr_x = r;
    }

    std::memcpy(s.pow_sums, pow_sums, sizeof s.pow_sums);
    s.blocks = std::move(kept);
    return s;
}

} // namespace

BlockStats extract_blocks(const MarkovModulatedBasis& b, std::uint64_t n_blocks,
                          Rng& rng, std::uint64_t block_transition_cap,
                          bool keep_blocks) {
    modulated_validate(b);
    if (n_blocks < 2) throw ModelError("extract_blocks: need n_blocks >= 2");

    double sum1[3] = {}, sum2[3][3] = {}, lag_sums[2][3] = {}, pow_sums[5][5] = {};
    std::vector<BlockTriple> kept;
    if (keep_blocks) kept.reserve(n_blocks);

    int state = b.initial_state;
    BlockTriple block0{};
    BlockTriple prev{};
    bool have_prev = false;

    for (std::uint64_t k = 0; k <= n_blocks; ++k) {
        BlockTriple cur{};
        std::uint64_t steps = 0;
        do {
            const int nxt = pick_next(b, state, rng);
            cur.t += dist_sample(b.t_dist(state, nxt), rng);
            cur.x += dist_sample(b.x_dist(state, nxt), rng);
            cur.tau += 1.0;
            state = nxt;
            if (++steps > block_transition_cap)
                throw ModelError("extract_blocks: reference state not reached within cap");
        } while (state != b.reference_state);

        if (k == 0) { block0 = cur; continue; }

        const double v[3] = {cur.tau, cur.t, cur.x};
        for (int i = 0; i < 3; ++i) {
            sum1[i] += v[i];
            for (int j = 0; j <= i; ++j) {
                sum2[i][j] += v[i] * v[j];
                sum2[j][i] = sum2[i][j];
            }
        }
        double tp = 1.0;
        for (int a = 0; a <= 4; ++a) {
            double xp = 1.0;
            for (int bb = 0; a + bb <= 4; ++bb) {
                pow_sums[a][bb] += tp * xp;
                xp *= cur.x;
            }
            tp *= cur.t;
        }
        if (have_prev) {
            lag_sums[0][0] += prev.t * cur.t;
            lag_sums[0][1] += prev.t;
            lag_sums[0][2] += cur.t;
            lag_sums[1][0] += prev.x * cur.x;
            lag_sums[1][1] += prev.x;
            lag_sums[1][2] += cur.x;
        }
        prev = cur;
        have_prev = true;
        if (keep_blocks) kept.push_back(cur);
    }
    return finalize_stats(block0, n_blocks, sum1, sum2, lag_sums, pow_sums,
                          std::move(kept));
}

BlockStats block_stats_from_triples(const BlockTriple& block0,
                                    const std::vector<BlockTriple>& blocks) {
    double sum1[3] = {}, sum2[3][3] = {}, lag_sums[2][3] = {}, pow_sums[5][5] = {};
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& cur = blocks[k];
        const double v[3] = {cur.tau, cur.t, cur.x};
        for (int i = 0; i < 3; ++i) {
            sum1[i] += v[i];
            for (int j = 0; j <= i; ++j) {
                sum2[i][j] += v[i] * v[j];
                sum2[j][i] = sum2[i][j];
            }
        }
        double tp = 1.0;
        for (int a = 0; a <= 4; ++a) {
            double xp = 1.0;
            for (int bb = 0; a + bb <= 4; ++bb) {
                pow_sums[a][bb] += tp * xp;
                xp *= cur.x;
            }
            tp *= cur.t;
        }
        if (k > 0) {
            lag_sums[0][0] += blocks[k - 1].t * cur.t;
            lag_sums[0][1] += blocks[k - 1].t;
            lag_sums[0][2] += cur.t;
            lag_sums[1][0] += blocks[k - 1].x * cur.x;
            lag_sums[1][1] += blocks[k - 1].x;
            lag_sums[1][2] += cur.x;
        }
    }
    return finalize_stats(block0, blocks.size(), sum1, sum2, lag_sums, pow_sums,
                          std::vector<BlockTriple>(blocks));
}

ModularCltParams modular_clt_params(const BlockStats& s, double det_floor) {
    if (!(s.mu_t > 0.0))
        throw DegeneracyError("modular_clt_params: block mean of T must be positive");
    if (!(s.det_q > det_floor))
        throw DegeneracyError("modular_clt_params: block correlation matrix is degenerate");

    MomentSet m;
    m.mu_T = s.mu_t;
    m.mu_X = s.mu_x;
    m.var_T = s.var_t;
    m.var_X = s.var_x;
    m.cov_XT = s.cov_xt;
    const RewardApproxParams p = reward_params(m);

    // Delta method over theta = (E T, E X, E T^2, E X^2, E TX):
    //   m_S       = b/a
    //   sigma_S^2 = (a^2 q02 + b^2 q20 - 2 a b q11) / a^3
    // with a = E T, b = E X, q20 = E T^2, q02 = E X^2, q11 = E TX.
    const double dn = (double)s.n_blocks;
    const double a = s.pow_sums[1][0] / dn, b = s.pow_sums[0][1] / dn;
    const double q20 = s.pow_sums[2][0] / dn, q02 = s.pow_sums[0][2] / dn;
    const double q11 = s.pow_sums[1][1] / dn;

    // covariance of the five sample means from power sums up to degree 4
    auto raw = [&](int pa, int pb) { return s.pow_sums[pa][pb] / dn; };
    const int key[5][2] = {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
    double cov5[5][5];
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const int pa = key[i][0] + key[j][0], pb = key[i][1] + key[j][1];
            cov5[i][j] = raw(pa, pb) - raw(key[i][0], key[i][1]) * raw(key[j][0], key[j][1]);
        }

    auto quad_form = [&](const double g[5]) {
        double acc = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) acc += g[i] * cov5[i][j] * g[j];
        return std::sqrt(std::max(acc, 0.0) / dn);
    };

    const double gm[5] = {-b / (a * a), 1.0 / a, 0.0, 0.0, 0.0};
    const double core = a * a * q02 + b * b * q20 - 2.0 * a * b * q11;
    const double gs[5] = {
        (2.0 * a * q02 - 2.0 * b * q11) / (a * a * a) - 3.0 * core / (a * a * a * a),
        (2.0 * b * q20 - 2.0 * a * q11) / (a * a * a),
        b * b / (a * a * a),
        1.0 / a,
        -2.0 * b / (a * a)};

    ModularCltParams out;
    out.params = p;
    out.se_m_s = quad_form(gm);
    out.se_sigma_s_sq = quad_form(gs);
    return out;
}

double simulate_modulated_sum(const MarkovModulatedBasis& b, double t,
                              std::uint64_t step_cap, Rng& rng) {
    if (!(t > 0.0)) throw DomainError("simulate_modulated_sum: level t must be > 0");
    int state = b.initial_state;
    double v = 0.0, s = 0.0;
    for (std::uint64_t n = 1; n <= step_cap; ++n) {
        const int nxt = pick_next(b, state, rng);
        v += dist_sample(b.t_dist(state, nxt), rng);
        s += dist_sample(b.x_dist(state, nxt), rng);
        state = nxt;
        if (v > t) return s;
    }
    throw ModelError("simulate_modulated_sum: step cap reached before crossing");
}

} // namespace csum
