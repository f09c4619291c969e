#pragma once
// Two-block configuration space, overlap geometry, Gaussian disorder fields,
// perturbation schedule omega(N) and the exact centering constants.
#include <cstdint>
#include <string>
#include <vector>

#include "remlab/rng.hpp"

namespace remlab {

struct model_params {
    int N = 20;              // even, 4 <= N <= n_cap
    double a1 = 0.6;         // in (1/2, 1); a2 = 1 - a1 derived
    double delta = 1.0;      // perturbation strength, >= 0
    double alpha = 4.0;      // omega(N) = alpha * log(N) / N
    double beta = 2.0;       // inverse temperature, >= 0
    int n_cap = 28;          // hard cap on N accepted by validation

    double a2() const { return 1.0 - a1; }
    double beta1() const;    // sqrt(log 2 / a1)
    double beta2() const;    // sqrt(log 2 / a2)
    double x1() const { return beta1() / beta; }
    double x2() const { return beta2() / beta; }
    double omega() const;    // alpha * log(N) / N
    double delta_n() const { return delta * omega(); }
    uint64_t half_count() const { return 1ull << (N / 2); }
    uint64_t config_count() const { return 1ull << N; }
};

struct param_issue {
    bool fatal = true;
    std::string message;
};

// Full validation; warnings carry fatal = false (e.g. alpha at or below
// 2/log 2, where the perturbation scale is not known to suffice).
std::vector<param_issue> validate(const model_params& p);
bool params_ok(const model_params& p);

struct configuration {
    uint64_t i1 = 0;  // block-1 index in [0, 2^{N/2})
    uint64_t i2 = 0;  // block-2 index in [0, 2^{N/2})

    static configuration from_flat(uint64_t flat, int N) {
        const uint64_t half = N / 2;
        return {flat >> half, flat & ((1ull << half) - 1)};
    }
    uint64_t flat(int N) const { return (i1 << (N / 2)) | i2; }
    bool operator==(const configuration&) const = default;
};

// Overlap q in {0, a2, a1, 1}; the four-bin order used everywhere in this
// project is (0, a2, a1, 1).
double overlap(const configuration& s, const configuration& t, const model_params& p);
inline double distance_from_overlap(double q) { return std::sqrt(1.0 - q); }

inline int overlap_bin(const configuration& s, const configuration& t) {
    const bool b1 = s.i1 == t.i1, b2 = s.i2 == t.i2;
    return b1 ? (b2 ? 3 : 2) : (b2 ? 1 : 0);
}

double omega_schedule(int N, double alpha);

struct centering_values {
    double aN1 = 0.0;        // block-1 centering
    double aN2_delta = 0.0;  // block-2 centering at effective variance a2(1+delta_N)
    double aN = 0.0;         // aN1 + aN2_delta
    double delta_aN2 = 0.0;  // aN2(delta) - aN2(0)
};

/// aN for one block of variance a_eff * N over 2^{N/2} configurations:
//   N*sqrt(a_eff log 2) - a_eff/(2 sqrt(a_eff log 2)) * log(2 pi a_eff N).
double block_centering(int N, double a_eff);
centering_values centering(const model_params& p);

// delta_aN2 / (a2 N delta_N) evaluated at size n (analytic, no sampling);
// converges to +beta2/2 as n grows.
double centering_trend(const model_params& p, int n);

// Limiting free energy f(beta) = g(a1) + g(a2),
// g(a,beta) = log2/2 + beta^2 a / 2 below the block critical point, else
// beta * sqrt(a log 2).
double analytic_free_energy(double beta, const model_params& p);

// Seeded deterministic access to the three disorder fields. Values are pure
// functions of (master_seed, seed_index, field id, flat index); no storage.
struct disorder {
    model_params p;
    uint64_t seed_index = 0;
    rng_stream f1, f2, fd;
    double s1 = 0.0, s2 = 0.0, sd = 0.0;  // field standard deviations

    disorder() = default;
    disorder(const model_params& params, uint64_t master_seed, uint64_t seed_idx);

    double x1(uint64_t i1) const { return s1 * f1.gaussian(i1); }
    double x2(uint64_t i2) const { return s2 * f2.gaussian(i2); }
    double xdelta(uint64_t i1, uint64_t i2) const {
        return sd != 0.0 ? sd * fd.gaussian((i1 << (p.N / 2)) | i2) : 0.0;
    }
    double energy(const configuration& s, bool perturbed) const {
        double e = x1(s.i1) + x2(s.i2);
        if (perturbed) e += xdelta(s.i1, s.i2);
        return e;
    }
};

} // namespace remlab
