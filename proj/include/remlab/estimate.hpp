#pragma once
// Streaming mean/variance accumulation (Welford) with count-weighted merging
// (Chan et al.), so disorder-parallel workers can combine partial results in
// any grouping and agree to ~1e-12 relative.
#include <cmath>
#include <cstdint>

namespace remlab {

struct estimate {
    double mean = 0.0;
    double std_error = 0.0;
    int64_t n_samples = 0;
};

struct accumulator {
    double mean = 0.0;
    double m2 = 0.0;
    int64_t n = 0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const accumulator& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

    estimate result() const {
        estimate e;
        e.mean = mean;
        e.n_samples = n;
        e.std_error = n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
        return e;
    }
};

inline accumulator mc_merge(accumulator a, const accumulator& b) {
    a.merge(b);
    return a;
}

// z-score of (a - b) against combined standard errors.
inline double z_diff(const estimate& a, const estimate& b) {
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    return se > 0.0 ? (a.mean - b.mean) / se : 0.0;
}

inline double z_against(const estimate& a, double ref) {
    return a.std_error > 0.0 ? (a.mean - ref) / a.std_error : 0.0;
}

} // namespace remlab
