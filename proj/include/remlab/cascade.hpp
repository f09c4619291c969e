#pragma once
// Two-level multiplicative cascade in the low-temperature limit.
//
// Construction: conditional on the first-level masses u_k (a Poisson-Dirichlet
// Gamma series with index x1), the full atom set {u_k * v} is a Poisson point
// process with intensity x2 * U * w^{-x2-1} dw, U = sum_k u_k^{x2}, and each
// atom carries the label k of its first-level parent independently with
// probability u_k^{x2} / U. Sampling the ranked atom series plus i.i.d. labels
// therefore reproduces the cascade exactly in law; no per-branch recursion is
// needed. Unmaterialized series tails are carried as their exact mean mass,
// and the residual law error (tail collision and fluctuation terms) is
// accounted in neglected_mass_bound, kept below eps by adaptive series depth.
#include <array>
#include <cstdint>
#include <vector>

#include "remlab/estimate.hpp"
#include "remlab/model.hpp"

namespace remlab {

struct cascade_realization {
    double beta = 0.0;       // inverse temperature the masses were built at
    double x1 = 0.0, x2 = 0.0;
    double eps = 0.0;
    double L1 = 0.0, L2 = 0.0;  // list-view thresholds

    // First-level series, decreasing masses u_k = e^{beta xi1_k}.
    std::vector<double> parent_u;
    double U = 0.0;               // sum u^{x2} plus parent_tail_mean
    double parent_tail_mean = 0.0;

    // Atom series, decreasing masses w_j = e^{beta (xi1 + xi2)}, with parent
    // labels (index into parent_u; assigned i.i.d. proportional to u^{x2}).
    std::vector<double> atom_w;
    std::vector<int64_t> atom_label;
    double T = 0.0;               // sum w plus atom_tail_mean
    double atom_tail_mean = 0.0;

    // Law-approximation budget actually used (tail collision probabilities
    // plus tail mean fluctuation); <= eps by construction.
    double neglected_mass_bound = 0.0;

    // Threshold lists: first-level points xi1 >= L1 (decreasing) and, for
    // each, its second-level increments xi2 >= L2 (decreasing). Child lists
    // are drawn on their own substream; exact in law given the parents.
    std::vector<double> xi1;
    std::vector<std::vector<double>> xi2;

    double sum_wbar_sq() const;   // sum over materialized atoms of (w/T)^2
};

cascade_realization sample_cascade(const model_params& p, double eps,
                                   uint64_t master_seed, uint64_t draw_index,
                                   double list_budget = 32.0);

// One replica drawn from the normalized atom masses. atom >= 0 indexes the
// materialized series; a tail draw gets a fresh negative id (distinct atoms)
// and a parent label drawn from the exact label law (which may name a
// materialized parent).
struct cascade_replica {
    int64_t atom = 0;
    int64_t label = 0;
};

struct cascade_sampler {
    const cascade_realization* r;
    int64_t next_fresh = -1;
    // cumulative tables over materialized masses
    std::vector<double> cum_w, cum_u;

    explicit cascade_sampler(const cascade_realization& real);
    cascade_replica draw(rng_seq& rs);
};

// Overlap of two replicas: 1 on the same atom, a1 on sibling atoms (same
// first-level parent), 0 otherwise.
double cascade_mark(const model_params& p, const cascade_replica& a,
                    const cascade_replica& b);

// Normalized weight view of a realization, optionally after the uniform shift
// xi -> xi + c (the normalized weights are invariant under it).
struct normalized_weights {
    std::vector<double> wbar;   // materialized atoms, decreasing
    double tail_fraction = 0.0;
    double total() const;
    double sumsq() const;
};
normalized_weights multiplicative_and_normalize(const cascade_realization& c,
                                                double beta, double shift = 0.0);

// Monte Carlo over fresh realizations: two-replica overlap law in bin order
// (0, a2, a1, 1) plus the mean normalized second moment E sum wbar^2.
struct cascade_law_result {
    std::array<estimate, 4> bins;
    estimate mean_sumsq;
};
cascade_law_result cascade_overlap_law(const model_params& p, double eps,
                                       int n_draws, uint64_t master_seed,
                                       int workers = 1);

} // namespace remlab
