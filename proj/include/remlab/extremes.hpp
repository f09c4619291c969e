#pragma once
// Near-maximum structure of the energy landscape: centered top-k point
// process with overlap marks, window counts against the limiting intensity,
// same-column pair statistics, localization events, and single-block max law.
#include <cstdint>
#include <vector>

#include "remlab/estimate.hpp"
#include "remlab/model.hpp"

namespace remlab {

struct marked_point {
    double value = 0.0;  // centered energy
    uint64_t id = 0;     // flat configuration index
};

// Points sorted by decreasing value, ties by increasing id. Marks are the
// pair overlaps of the underlying configurations; mark(i,i) is the
// self-overlap 1.
struct marked_point_process {
    model_params prm;
    std::vector<marked_point> points;
    double mark(size_t i, size_t j) const {
        if (i == j) return 1.0;
        const configuration a = configuration::from_flat(points[i].id, prm.N);
        const configuration b = configuration::from_flat(points[j].id, prm.N);
        return overlap(a, b, prm);
    }
};

marked_point_process top_k_shifted(const model_params& p, uint64_t master_seed,
                                   uint64_t seed_index, bool perturbed, int k);

// E #{sigma : X1-aN1 in [lo1,hi1], X2+Xdelta-aN2 in [lo2,hi2]} and its
// limiting product-exponential reference.
double window_reference(const model_params& p, double lo1, double hi1,
                        double lo2, double hi2);
estimate window_count(const model_params& p, bool perturbed, double lo1,
                      double hi1, double lo2, double hi2, int n_seeds,
                      uint64_t master_seed, int workers = 1);

// Same-column near-maximum pairs: distinct first coordinates sharing one
// second coordinate, both total centered energies inside [lo,hi].
struct forbidden_stats {
    estimate event_rate;  // fraction of seeds where at least one pair exists
    estimate mean_pairs;  // mean number of such pairs per seed
};
forbidden_stats forbidden_pairs(const model_params& p, bool perturbed,
                                double lo, double hi, int n_seeds,
                                uint64_t master_seed, int workers = 1);

// Per-seed event: some configuration with centered total energy in [lo,hi]
// whose block coordinates do not both lie in [mlo,mhi].
bool localization_event(const model_params& p, uint64_t master_seed,
                        uint64_t seed_index, bool perturbed, double lo,
                        double hi, double mlo, double mhi);
estimate localization_rate(const model_params& p, bool perturbed, double lo,
                           double hi, double mlo, double mhi, int n_seeds,
                           uint64_t master_seed, int workers = 1);

// Single-block maximum versus the Gumbel limit exp(-exp(-beta_l x)).
enum class center_mode { quantile, formula };

// Level m with 2^{N/2} * P[N(0, a_eff*N) > m] = 1 (exact finite-size
// calibration of the point process intensity).
double block_quantile_center(const model_params& p, int block);

std::vector<double> block_max_sample(const model_params& p, int block,
                                     int n_seeds, uint64_t master_seed,
                                     center_mode mode, int workers = 1);

// One-sample KS distance against G(x) = exp(-exp(-beta_l x)).
double ks_gumbel(std::vector<double> xs, double beta_l);

} // namespace remlab
