#pragma once
// Bolthausen-Sznitman coalescent: trajectory sampling by inverse-cdf merge
// sizes, pair merge times, threshold marks, and composition with a
// Poisson-Dirichlet point process.
#include <cstdint>
#include <limits>
#include <vector>

#include "remlab/estimate.hpp"
#include "remlab/model.hpp"
#include "remlab/rng.hpp"

#include <array>

namespace remlab {

inline constexpr double kAboveHorizon = std::numeric_limits<double>::infinity();
inline constexpr int kCoalescentCap = 10000;

// Rate of one specific k-subset merge from b blocks:
// lambda_{b,k} = (k-2)! (b-k)! / (b-1)!. Total merge rate is b-1.
double bs_merge_rate(int b, int k);

struct coalescent_event {
    double time = 0.0;
    std::vector<int> blocks_merged;  // node ids, ascending
    int new_block = 0;
};

// Leaves are nodes 0..n-1 (birth 0); each merge appends a node. Times are
// strictly increasing; merges after the horizon are not recorded.
struct coalescent_trajectory {
    int n_leaves = 0;
    double horizon = kAboveHorizon;
    std::vector<coalescent_event> events;
    std::vector<int> parent;    // -1 when never merged within the horizon
    std::vector<double> birth;
    int n_final = 0;            // block count at the horizon

    int n_nodes() const { return static_cast<int>(parent.size()); }
};

coalescent_trajectory sample_bs_coalescent(int n, double horizon, rng_seq& rs);

// Merge time of the blocks containing i and j; 0 when i == j, kAboveHorizon
// when they never merge within the horizon.
double pair_time(const coalescent_trajectory& c, int i, int j);

// Representative node of each leaf's block at time t.
std::vector<int> blocks_at(const coalescent_trajectory& c, double t);

// Threshold marks: 1 on the diagonal, a1 for pairs merged by t_star, else 0.
double assign_mark(const model_params& p, const std::vector<int>& reps, int i,
                   int j);

// ln(x2/x1): the merge-time threshold reproducing the two-replica law.
double mark_threshold(const model_params& p);

// Normalized Poisson-Dirichlet(x2) atoms composed with an independent
// coalescent run to the mark threshold.
struct composition {
    model_params prm;
    double t_star = 0.0;
    std::vector<double> wbar;    // materialized atoms, decreasing
    double tail_fraction = 0.0;  // mean mass beyond the series
    coalescent_trajectory traj;  // on the materialized atoms
    std::vector<int> reps;       // blocks at t_star
    std::vector<double> cum;     // cumulative wbar, for replica draws

    double mark(int i, int j) const;
    double sumsq() const;
    double weight_total() const;

    // Replica index from the normalized masses; negative ids are fresh tail
    // atoms. Marks involving fresh atoms use the exchangeable pair-time
    // marginal Exp(1).
    int64_t draw_replica(rng_seq& rs, int64_t& next_fresh) const;
    double pair_mark(rng_seq& rs, int64_t i, int64_t j) const;
};

composition compose_ppp_coalescent(const model_params& p, int n_top,
                                   uint64_t master_seed, uint64_t draw_index);

// Monte Carlo two-replica law through the composition route, bin order
// (0, a2, a1, 1), plus E sum wbar^2.
struct composition_law_result {
    std::array<estimate, 4> bins;
    estimate mean_sumsq;
};
composition_law_result composition_overlap_law(const model_params& p, int n_top,
                                               int n_draws, uint64_t master_seed,
                                               int workers = 1);

} // namespace remlab
