#pragma once
// Counter-based RNG: Threefry2x64 with 20 rounds. Every variate is a pure
// function of (key, counter), so any field entry can be regenerated at random
// access without storing the field. Gaussian variates use the AS241 inverse
// normal CDF (PPND16); this choice is fixed per build and pinned by the
// known-answer tests in tests/test_rng.cpp.
#include <cstdint>
#include <cmath>

namespace remlab {

namespace detail {

inline constexpr uint64_t kThreefryParity = 0x1BD11BDAA9FC1A22ull;

inline constexpr uint64_t rotl64(uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
}

} // namespace detail

struct u64x2 {
    uint64_t v0, v1;
};

// Threefry2x64-20 block function.
inline u64x2 threefry2x64(u64x2 ctr, u64x2 key) {
    static constexpr int R[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const uint64_t ks[3] = {key.v0, key.v1,
                            detail::kThreefryParity ^ key.v0 ^ key.v1};
    uint64_t x0 = ctr.v0 + ks[0];
    uint64_t x1 = ctr.v1 + ks[1];
    for (int i = 0; i < 20; ++i) {
        x0 += x1;
        x1 = detail::rotl64(x1, R[i % 8]);
        x1 ^= x0;
        if (i % 4 == 3) {
            const uint64_t j = static_cast<uint64_t>(i / 4) + 1; // 1..5
            x0 += ks[j % 3];
            x1 += ks[(j + 1) % 3] + j;
        }
    }
    return {x0, x1};
}

// Map a u64 to (0,1): 52 bits plus a half-ulp offset so 0 and 1 are never
// returned (safe for log() and inverse CDFs). With 52 bits k + 0.5 is exact,
// so the result is exactly (k + 0.5) * 2^-52 with no rounding at either end.
inline double u64_to_unit(uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

// AS241 PPND16: inverse of the standard normal CDF, ~1e-15 relative accuracy.
double inv_normal_cdf(double p);

// Upper tail of the standard normal CDF.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / 1.4142135623730951);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// One logical random stream: key = (seed material, field id). The counter
// splits into (index, purpose) so independent purposes never collide.
struct rng_stream {
    uint64_t key0 = 0;
    uint64_t key1 = 0;

    rng_stream() = default;
    rng_stream(uint64_t master_seed, uint64_t field_id)
        : key0(master_seed), key1(field_id) {}

    // Sub-stream for disorder seed s: golden-ratio stride keeps keys distinct
    // for any (master, s) pair actually reachable in a run.
    static rng_stream for_seed(uint64_t master_seed, uint64_t seed_index,
                               uint64_t field_id) {
        return rng_stream(master_seed + 0x9E3779B97F4A7C15ull * (seed_index + 1),
                          field_id);
    }

    uint64_t bits(uint64_t index, uint64_t purpose = 0) const {
        return threefry2x64({index, purpose}, {key0, key1}).v0;
    }
    u64x2 bits2(uint64_t index, uint64_t purpose = 0) const {
        return threefry2x64({index, purpose}, {key0, key1});
    }
    double u01(uint64_t index, uint64_t purpose = 0) const {
        return u64_to_unit(bits(index, purpose));
    }
    double gaussian(uint64_t index, uint64_t purpose = 0) const {
        return inv_normal_cdf(u01(index, purpose));
    }
    double expo(uint64_t index, uint64_t purpose = 0) const {
        return -std::log(u01(index, purpose));
    }
};

// Sequential view over a stream for sampling loops.
struct rng_seq {
    rng_stream s;
    uint64_t purpose = 0;
    uint64_t i = 0;

    rng_seq() = default;
    rng_seq(rng_stream stream, uint64_t purpose_tag = 0)
        : s(stream), purpose(purpose_tag) {}

    uint64_t bits() { return s.bits(i++, purpose); }
    double u01() { return s.u01(i++, purpose); }
    double gaussian() { return s.gaussian(i++, purpose); }
    double expo() { return s.expo(i++, purpose); }
};

// Field ids (key1 domains). Disorder fields 1..3 must stay stable across
// versions: acceptance tests replay seeds.
namespace field {
inline constexpr uint64_t block1 = 1;       // X^(1), variance N*a1
inline constexpr uint64_t block2 = 2;       // X^(2), variance N*a2
inline constexpr uint64_t onsite = 3;       // X^delta, variance N*a2*delta*omega
inline constexpr uint64_t replica = 4;      // Gibbs replica draws
inline constexpr uint64_t coalescent = 5;   // merge times and k-draws
inline constexpr uint64_t atoms = 6;        // cascade atom series
inline constexpr uint64_t parents = 7;      // cascade first-level series
inline constexpr uint64_t labels = 8;       // cascade atom->parent labels
inline constexpr uint64_t pfield1 = 9;      // p-power field, block-1 part
inline constexpr uint64_t pfield2 = 10;     // p-power field, block-2 part
inline constexpr uint64_t pfield12 = 11;    // p-power field, on-site part
inline constexpr uint64_t scratch = 12;
inline constexpr uint64_t children = 13;    // cascade per-parent child lists
} // namespace field

} // namespace remlab
