#pragma once
// Exact Gibbs measure by full enumeration: log-sum-exp partition function,
// replica sampling, exact pair-overlap bins, bracket contractions used by the
// identity checks, and the factorized fast path for the unperturbed measure.
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "remlab/estimate.hpp"
#include "remlab/model.hpp"

namespace remlab {

enum class errc { ok = 0, config = 2, resource = 3, internal = 4 };

struct remlab_error : std::runtime_error {
    errc code;
    remlab_error(errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// Cached block-1 / block-2 field values for one disorder realization.
struct block_fields {
    std::vector<double> x1, x2;
    explicit block_fields(const disorder& d) {
        const uint64_t n = d.p.half_count();
        x1.resize(n);
        x2.resize(n);
        for (uint64_t i = 0; i < n; ++i) x1[i] = d.x1(i);
        for (uint64_t j = 0; j < n; ++j) x2[j] = d.x2(j);
    }
};

// Stream the energies of all 2^N configurations in flat order (i1 major).
// The single hot loop shared by table builds and extremal scans.
template <class F>
void stream_energies(const disorder& d, const block_fields& bf, bool perturbed, F&& f) {
    const uint64_t n = d.p.half_count();
    const bool pert = perturbed && d.sd != 0.0;
    uint64_t flat = 0;
    for (uint64_t i1 = 0; i1 < n; ++i1) {
        const double base = bf.x1[i1];
        for (uint64_t i2 = 0; i2 < n; ++i2, ++flat) {
            double e = base + bf.x2[i2];
            if (pert) e += d.sd * d.fd.gaussian(flat);
            f(flat, e);
        }
    }
}

// Probabilities over the four overlap values, in bin order (0, a2, a1, 1).
using pair_bins = std::array<double, 4>;

inline constexpr int kTableCap = 26;  // full table = 2^N doubles

struct gibbs_table {
    model_params prm;
    uint64_t seed_index = 0;
    bool perturbed = true;
    double logZ = 0.0;
    std::vector<double> prob;        // normalized, size 2^N
    std::vector<double> row, col;    // marginals of i1 / i2
    double sum_p2 = 0.0;             // sum of prob^2 (the q=1 atom)
    std::vector<double> cdf;         // built on demand for sampling

    double free_energy() const { return logZ / prm.N; }
    uint64_t half() const { return prm.half_count(); }

    // Exact E_G x G of the four overlap bins for this realization.
    pair_bins exact_pair_bins() const;

    // h_k(sigma) = <q_{sigma,tau}^k>_tau for monomial power k >= 1.
    double h_mono(uint64_t flat, int k) const {
        const uint64_t i1 = flat >> (prm.N / 2);
        const uint64_t i2 = flat & (half() - 1);
        const double ps = prob[flat];
        return ps + std::pow(prm.a1, k) * (row[i1] - ps) +
               std::pow(prm.a2(), k) * (col[i2] - ps);
    }

    void ensure_cdf();
    configuration draw(rng_seq& rs) const;     // requires ensure_cdf()
    uint64_t draw_flat(rng_seq& rs) const;
};

// Builds the full-table Gibbs measure. uniform_hook forces all energies to 0
// (test hook for closed-form checks). Extra log-weight terms can be injected
// via the addon callback (used by the identity checks to add p-power fields).
gibbs_table build_gibbs(const model_params& p, uint64_t master_seed,
                        uint64_t seed_index, bool perturbed,
                        bool uniform_hook = false,
                        const std::function<double(uint64_t)>& extra_logw = {});

double log_partition(const model_params& p, uint64_t master_seed,
                     uint64_t seed_index, bool perturbed);

// Factorized unperturbed measure: two independent block tables of size
// 2^{N/2}. Exact bins and sampling without touching 2^N storage.
struct product_gibbs {
    model_params prm;
    double logZ = 0.0;
    std::vector<double> p1, p2;      // block marginals
    std::vector<double> cdf1, cdf2;
    double sumsq1 = 0.0, sumsq2 = 0.0;

    double free_energy() const { return logZ / prm.N; }
    pair_bins exact_pair_bins() const;
    configuration draw(rng_seq& rs) const;
};

product_gibbs build_product_gibbs(const model_params& p, uint64_t master_seed,
                                  uint64_t seed_index);

// Disorder-averaged operations (MC over seeds, exact inner brackets).
std::array<estimate, 4> overlap_histogram(const model_params& p, bool perturbed,
                                          int n_seeds, uint64_t master_seed,
                                          int workers = 1);

estimate ultrametric_violation_rate(const model_params& p, bool perturbed,
                                    int n_seeds, int n_triples,
                                    uint64_t master_seed, int workers = 1);

// E G^{exponent-product} of prod_{(i,j)} q_{ij}^{k_ij} over s replicas.
struct mono_exponent { int i = 1, j = 2, k = 1; };
estimate overlap_observable(const model_params& p, bool perturbed, int s,
                            const std::vector<mono_exponent>& ks, int n_seeds,
                            int n_draws, uint64_t master_seed, int workers = 1);

estimate mean_free_energy(const model_params& p, bool perturbed, int n_seeds,
                          uint64_t master_seed, int workers = 1);

} // namespace remlab
