#ifndef CSUM_MODULAR_HPP
#define CSUM_MODULAR_HPP

#include "csum/basis.hpp"
#include "csum/renewal.hpp"
#include "csum/rng.hpp"

#include <cstdint>
#include <vector>

namespace csum {

// Markov-modulated basis: embedded chain on {0,..,n_states-1}; each
// transition (from, to) draws an independent (T, X) pair from its edge
// distributions, T supported on (0, inf).
struct MarkovModulatedBasis {
    int n_states = 0;
    std::vector<double> transition;         // row-major, rows sum to 1
    std::vector<DistributionSpec> t_dists;  // edge (i, j) at i * n_states + j
    std::vector<DistributionSpec> x_dists;
    int initial_state = 0;
    int reference_state = 0;

    double p(int i, int j) const { return transition[(std::size_t)i * n_states + j]; }
    const DistributionSpec& t_dist(int i, int j) const { return t_dists[(std::size_t)i * n_states + j]; }
    const DistributionSpec& x_dist(int i, int j) const { return x_dists[(std::size_t)i * n_states + j]; }
};

// Rows stochastic, chain irreducible (pairwise reachability), T positive.
void modulated_validate(const MarkovModulatedBasis& b);

// Stationary law of the embedded chain (linear solve; works for periodic chains).
std::vector<double> stationary_distribution(const MarkovModulatedBasis& b);

struct BlockTriple {
    double tau; // transitions in the block
    double t;   // sum of T over the block
    double x;   // sum of X over the block
};

// Regeneration blocks delimited by successive visits to the reference state.
// Block 0 (initial state to first visit) is kept separate; blocks k >= 1 are
// i.i.d. and pooled into moment estimates.
struct BlockStats {
    BlockTriple block0{};
    std::uint64_t n_blocks = 0;

    double mu_tau = 0, mu_t = 0, mu_x = 0;
    double var_tau = 0, var_t = 0, var_x = 0;
    double cov_xt = 0, cov_xtau = 0, cov_ttau = 0;

    double corr_xt = 0, corr_xtau = 0, corr_ttau = 0;
    double det_q = 0; // det of the 3x3 correlation matrix of (X, T, tau)

    // lag-1 sample correlations between consecutive blocks
    double lag1_corr_t = 0, lag1_corr_x = 0;

    // raw power sums sum T^a X^b, a + b <= 4, for delta-method errors
    double pow_sums[5][5] = {};

    std::vector<BlockTriple> blocks; // filled only when keep_blocks

    void correlation_q(double q[3][3]) const;
};

BlockStats extract_blocks(const MarkovModulatedBasis& b, std::uint64_t n_blocks,
                          Rng& rng, std::uint64_t block_transition_cap = 1000000,
                          bool keep_blocks = false);

// Same estimates from stored triples (order-insensitive by construction;
// used by the permutation-invariance test).
BlockStats block_stats_from_triples(const BlockTriple& block0,
                                    const std::vector<BlockTriple>& blocks);

struct ModularCltParams {
    RewardApproxParams params; // m_S = mu_X / mu_T, sigma_S^2 over block moments
    double se_m_s = 0;         // delta-method standard errors of the estimates
    double se_sigma_s_sq = 0;
};

// Plug-in of block moments into the reward-approximation formulas.  Throws
// DegeneracyError when mu_T <= 0 or det of the block correlation matrix is
// at or below det_floor.
ModularCltParams modular_clt_params(const BlockStats& s, double det_floor = 1e-6);

// S_{N_inf(t)} for one modulated path (level crossing of the T-walk).
double simulate_modulated_sum(const MarkovModulatedBasis& b, double t,
                              std::uint64_t step_cap, Rng& rng);

} // namespace csum

#endif
