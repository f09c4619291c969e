#include "remlab/extremes.hpp"

#include <algorithm>
#include <cmath>

#include "remlab/gibbs.hpp"
#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"

namespace remlab {

namespace {

struct acc_state {
    accumulator a;
    void merge(const acc_state& o) { a.merge(o.a); }
};

struct pair_state {
    accumulator ev, cnt;
    void merge(const pair_state& o) {
        ev.merge(o.ev);
        cnt.merge(o.cnt);
    }
};

} // namespace

marked_point_process top_k_shifted(const model_params& p, uint64_t master_seed,
                                   uint64_t seed_index, bool perturbed, int k) {
    if (k < 1) throw remlab_error(errc::config, "top-k needs k >= 1");
    marked_point_process mpp;
    mpp.prm = p;
    disorder d(p, master_seed, seed_index);
    block_fields bf(d);
    const centering_values cv = centering(p);
    const double shift =
        perturbed ? cv.aN
                  : block_centering(p.N, p.a1) + block_centering(p.N, p.a2());
    // Keep the k best under (value desc, id asc); heap top is the weakest.
    auto weaker = [](const marked_point& a, const marked_point& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.id < b.id;
    };
    std::vector<marked_point> heap;
    heap.reserve(k + 1);
    stream_energies(d, bf, perturbed, [&](uint64_t flat, double e) {
        const marked_point mp{e - shift, flat};
        if (static_cast<int>(heap.size()) < k) {
            heap.push_back(mp);
            std::push_heap(heap.begin(), heap.end(), weaker);
        } else if (weaker(mp, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), weaker);
            heap.back() = mp;
            std::push_heap(heap.begin(), heap.end(), weaker);
        }
    });
    std::sort(heap.begin(), heap.end(), [](const marked_point& a, const marked_point& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.id < b.id;
    });
    mpp.points = std::move(heap);
    return mpp;
}

double window_reference(const model_params& p, double lo1, double hi1,
                        double lo2, double hi2) {
    auto seg = [](double beta, double lo, double hi) {
        return (std::exp(-beta * lo) - std::exp(-beta * hi)) / beta;
    };
    return seg(p.beta1(), lo1, hi1) * seg(p.beta2(), lo2, hi2);
}

estimate window_count(const model_params& p, bool perturbed, double lo1,
                      double hi1, double lo2, double hi2, int n_seeds,
                      uint64_t master_seed, int workers) {
    const centering_values cv = centering(p);
    const double a2c = perturbed ? cv.aN2_delta : block_centering(p.N, p.a2());
    const uint64_t n = p.half_count();
    auto st = run_seeds<acc_state>(n_seeds, workers, [&](uint64_t s, acc_state& acc) {
        disorder d(p, master_seed, s);
        block_fields bf(d);
        std::vector<uint64_t> hits1;
        for (uint64_t i1 = 0; i1 < n; ++i1) {
            const double v = bf.x1[i1] - cv.aN1;
            if (v >= lo1 && v <= hi1) hits1.push_back(i1);
        }
        uint64_t count = 0;
        const bool pert = perturbed && d.sd != 0.0;
        if (!pert) {
            uint64_t c2 = 0;
            for (uint64_t i2 = 0; i2 < n; ++i2) {
                const double v = bf.x2[i2] - a2c;
                if (v >= lo2 && v <= hi2) ++c2;
            }
            count = hits1.size() * c2;
        } else {
            for (uint64_t i1 : hits1) {
                const uint64_t base = i1 << (p.N / 2);
                for (uint64_t i2 = 0; i2 < n; ++i2) {
                    const double v = bf.x2[i2] + d.sd * d.fd.gaussian(base | i2) - a2c;
                    if (v >= lo2 && v <= hi2) ++count;
                }
            }
        }
        acc.a.add(static_cast<double>(count));
    });
    return st.a.result();
}

forbidden_stats forbidden_pairs(const model_params& p, bool perturbed,
                                double lo, double hi, int n_seeds,
                                uint64_t master_seed, int workers) {
    const centering_values cv = centering(p);
    const double shift =
        perturbed ? cv.aN
                  : block_centering(p.N, p.a1) + block_centering(p.N, p.a2());
    const uint64_t n = p.half_count();
    auto st = run_seeds<pair_state>(n_seeds, workers, [&](uint64_t s, pair_state& acc) {
        disorder d(p, master_seed, s);
        block_fields bf(d);
        std::vector<uint32_t> colhits(n, 0);
        stream_energies(d, bf, perturbed, [&](uint64_t flat, double e) {
            const double v = e - shift;
            if (v >= lo && v <= hi) ++colhits[flat & (n - 1)];
        });
        uint64_t pairs = 0;
        for (uint64_t c : colhits) pairs += c * (c - 1) / 2;
        acc.ev.add(pairs > 0 ? 1.0 : 0.0);
        acc.cnt.add(static_cast<double>(pairs));
    });
    return {st.ev.result(), st.cnt.result()};
}

bool localization_event(const model_params& p, uint64_t master_seed,
                        uint64_t seed_index, bool perturbed, double lo,
                        double hi, double mlo, double mhi) {
    const centering_values cv = centering(p);
    const double a2c = perturbed ? cv.aN2_delta : block_centering(p.N, p.a2());
    disorder d(p, master_seed, seed_index);
    block_fields bf(d);
    const uint64_t n = p.half_count();
    const bool pert = perturbed && d.sd != 0.0;
    for (uint64_t i1 = 0; i1 < n; ++i1) {
        const double v1 = bf.x1[i1] - cv.aN1;
        const uint64_t base = i1 << (p.N / 2);
        for (uint64_t i2 = 0; i2 < n; ++i2) {
            double v2 = bf.x2[i2] - a2c;
            if (pert) v2 += d.sd * d.fd.gaussian(base | i2);
            const double tot = v1 + v2;
            if (tot < lo || tot > hi) continue;
            if (v1 < mlo || v1 > mhi || v2 < mlo || v2 > mhi) return true;
        }
    }
    return false;
}

estimate localization_rate(const model_params& p, bool perturbed, double lo,
                           double hi, double mlo, double mhi, int n_seeds,
                           uint64_t master_seed, int workers) {
    auto st = run_seeds<acc_state>(n_seeds, workers, [&](uint64_t s, acc_state& acc) {
        acc.a.add(localization_event(p, master_seed, s, perturbed, lo, hi, mlo, mhi)
                      ? 1.0
                      : 0.0);
    });
    return st.a.result();
}

double block_quantile_center(const model_params& p, int block) {
    const double a_eff = block == 1 ? p.a1 : p.a2();
    const double sigma = std::sqrt(a_eff * p.N);
    const double target = -(p.N / 2) * 0.6931471805599453;  // solve ln sf = -ln 2^{N/2}
    const double guess = p.N * std::sqrt(a_eff * 0.6931471805599453);
    double lo = 0.0, hi = 1.5 * guess + 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::log(normal_sf(mid / sigma)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> block_max_sample(const model_params& p, int block,
                                     int n_seeds, uint64_t master_seed,
                                     center_mode mode, int workers) {
    if (block != 1 && block != 2)
        throw remlab_error(errc::config, "block must be 1 or 2");
    const double a_eff = block == 1 ? p.a1 : p.a2();
    const double shift = mode == center_mode::quantile
                             ? block_quantile_center(p, block)
                             : block_centering(p.N, a_eff);
    const uint64_t field_id = block == 1 ? field::block1 : field::block2;
    const double sd = std::sqrt(a_eff * p.N);
    const uint64_t n = p.half_count();
    struct max_state {
        std::vector<double> xs;
        void merge(const max_state& o) { xs.insert(xs.end(), o.xs.begin(), o.xs.end()); }
    };
    auto st = run_seeds<max_state>(n_seeds, workers, [&](uint64_t s, max_state& acc) {
        rng_stream stream = rng_stream::for_seed(master_seed, s, field_id);
        double mx = -1e300;
        for (uint64_t i = 0; i < n; ++i)
            mx = std::max(mx, sd * stream.gaussian(i));
        acc.xs.push_back(mx - shift);
    });
    return st.xs;
}

double ks_gumbel(std::vector<double> xs, double beta_l) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double g = std::exp(-std::exp(-beta_l * xs[i]));
        d = std::max(d, (i + 1) / n - g);
        d = std::max(d, g - i / n);
    }
    return d;
}

} // namespace remlab
