#include "remlab/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"

namespace remlab {

namespace {

// Kahan-compensated sum, used on 2^N-sized reductions.
struct kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

void check_table_size(const model_params& p) {
    if (p.N > kTableCap)
        throw remlab_error(errc::resource,
                           "full Gibbs table needs N <= " + std::to_string(kTableCap) +
                               ", got N = " + std::to_string(p.N));
}

void check_params(const model_params& p) {
    auto issues = validate(p);
    for (const auto& is : issues)
        if (is.fatal) throw remlab_error(errc::config, is.message);
}

uint64_t sample_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<uint64_t>(it - cdf.begin());
}

} // namespace

pair_bins gibbs_table::exact_pair_bins() const {
    kahan r1, r2;
    for (double v : row) r1.add(v * v);
    for (double v : col) r2.add(v * v);
    const double p1 = sum_p2;
    return {1.0 - r1.s - r2.s + p1, r2.s - p1, r1.s - p1, p1};
}

void gibbs_table::ensure_cdf() {
    if (!cdf.empty()) return;
    cdf.resize(prob.size());
    double acc = 0.0;
    for (size_t i = 0; i < prob.size(); ++i) {
        acc += prob[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
}

uint64_t gibbs_table::draw_flat(rng_seq& rs) const {
    return sample_cdf(cdf, rs.u01());
}

configuration gibbs_table::draw(rng_seq& rs) const {
    return configuration::from_flat(draw_flat(rs), prm.N);
}

gibbs_table build_gibbs(const model_params& p, uint64_t master_seed,
                        uint64_t seed_index, bool perturbed, bool uniform_hook,
                        const std::function<double(uint64_t)>& extra_logw) {
    check_params(p);
    check_table_size(p);
    gibbs_table t;
    t.prm = p;
    t.seed_index = seed_index;
    t.perturbed = perturbed;
    const uint64_t n = p.half_count();
    const uint64_t total = p.config_count();
    t.prob.resize(total);
    double maxl = -1e300;
    if (uniform_hook) {
        std::fill(t.prob.begin(), t.prob.end(), 0.0);
        maxl = 0.0;
        if (extra_logw)
            for (uint64_t i = 0; i < total; ++i) {
                t.prob[i] = extra_logw(i);
                maxl = std::max(maxl, t.prob[i]);
            }
    } else {
        disorder d(p, master_seed, seed_index);
        block_fields bf(d);
        stream_energies(d, bf, perturbed, [&](uint64_t flat, double e) {
            double l = p.beta * e;
            if (extra_logw) l += extra_logw(flat);
            t.prob[flat] = l;
            if (l > maxl) maxl = l;
        });
    }
    kahan z;
    for (uint64_t i = 0; i < total; ++i) {
        t.prob[i] = std::exp(t.prob[i] - maxl);
        z.add(t.prob[i]);
    }
    t.logZ = maxl + std::log(z.s);
    const double inv = 1.0 / z.s;
    t.row.assign(n, 0.0);
    t.col.assign(n, 0.0);
    kahan p2;
    uint64_t flat = 0;
    for (uint64_t i1 = 0; i1 < n; ++i1) {
        kahan rowsum;
        for (uint64_t i2 = 0; i2 < n; ++i2, ++flat) {
            const double w = t.prob[flat] * inv;
            t.prob[flat] = w;
            rowsum.add(w);
            t.col[i2] += w;
            p2.add(w * w);
        }
        t.row[i1] = rowsum.s;
    }
    t.sum_p2 = p2.s;
    return t;
}

double log_partition(const model_params& p, uint64_t master_seed,
                     uint64_t seed_index, bool perturbed) {
    check_params(p);
    check_table_size(p);
    disorder d(p, master_seed, seed_index);
    block_fields bf(d);
    double maxl = -1e300;
    std::vector<double> ls(p.config_count());
    stream_energies(d, bf, perturbed, [&](uint64_t flat, double e) {
        ls[flat] = p.beta * e;
        if (ls[flat] > maxl) maxl = ls[flat];
    });
    kahan z;
    for (double l : ls) z.add(std::exp(l - maxl));
    return maxl + std::log(z.s);
}

namespace {

struct block_build {
    std::vector<double> prob, cdf;
    double logZ = 0.0, sumsq = 0.0;
};

block_build build_block(const std::vector<double>& x, double beta) {
    block_build b;
    const size_t n = x.size();
    b.prob.resize(n);
    double maxl = -1e300;
    for (size_t i = 0; i < n; ++i) {
        b.prob[i] = beta * x[i];
        maxl = std::max(maxl, b.prob[i]);
    }
    kahan z;
    for (size_t i = 0; i < n; ++i) {
        b.prob[i] = std::exp(b.prob[i] - maxl);
        z.add(b.prob[i]);
    }
    b.logZ = maxl + std::log(z.s);
    b.cdf.resize(n);
    double acc = 0.0;
    kahan sq;
    for (size_t i = 0; i < n; ++i) {
        b.prob[i] /= z.s;
        sq.add(b.prob[i] * b.prob[i]);
        acc += b.prob[i];
        b.cdf[i] = acc;
    }
    b.cdf.back() = 1.0;
    b.sumsq = sq.s;
    return b;
}

} // namespace

product_gibbs build_product_gibbs(const model_params& p, uint64_t master_seed,
                                  uint64_t seed_index) {
    check_params(p);
    product_gibbs g;
    g.prm = p;
    disorder d(p, master_seed, seed_index);
    block_fields bf(d);
    block_build b1 = build_block(bf.x1, p.beta);
    block_build b2 = build_block(bf.x2, p.beta);
    g.logZ = b1.logZ + b2.logZ;
    g.p1 = std::move(b1.prob);
    g.p2 = std::move(b2.prob);
    g.cdf1 = std::move(b1.cdf);
    g.cdf2 = std::move(b2.cdf);
    g.sumsq1 = b1.sumsq;
    g.sumsq2 = b2.sumsq;
    return g;
}

pair_bins product_gibbs::exact_pair_bins() const {
    const double a = sumsq1, b = sumsq2;
    // P[q=1] = a*b, P[q=a1] = a*(1-b), P[q=a2] = (1-a)*b.
    return {(1.0 - a) * (1.0 - b), (1.0 - a) * b, a * (1.0 - b), a * b};
}

configuration product_gibbs::draw(rng_seq& rs) const {
    configuration c;
    c.i1 = sample_cdf(cdf1, rs.u01());
    c.i2 = sample_cdf(cdf2, rs.u01());
    return c;
}

namespace {

struct bins_state {
    accumulator b[4];
    void merge(const bins_state& o) {
        for (int i = 0; i < 4; ++i) b[i].merge(o.b[i]);
    }
};

struct acc_state {
    accumulator a;
    void merge(const acc_state& o) { a.merge(o.a); }
};

} // namespace

std::array<estimate, 4> overlap_histogram(const model_params& p, bool perturbed,
                                          int n_seeds, uint64_t master_seed,
                                          int workers) {
    auto st = run_seeds<bins_state>(n_seeds, workers, [&](uint64_t s, bins_state& acc) {
        pair_bins bins;
        if (!perturbed || p.delta == 0.0)
            bins = build_product_gibbs(p, master_seed, s).exact_pair_bins();
        else
            bins = build_gibbs(p, master_seed, s, true).exact_pair_bins();
        for (int i = 0; i < 4; ++i) acc.b[i].add(bins[i]);
    });
    return {st.b[0].result(), st.b[1].result(), st.b[2].result(), st.b[3].result()};
}

estimate mean_free_energy(const model_params& p, bool perturbed, int n_seeds,
                          uint64_t master_seed, int workers) {
    auto st = run_seeds<acc_state>(n_seeds, workers, [&](uint64_t s, acc_state& acc) {
        double lz;
        if (!perturbed || p.delta == 0.0)
            lz = build_product_gibbs(p, master_seed, s).logZ;
        else
            lz = log_partition(p, master_seed, s, true);
        acc.a.add(lz / p.N);
    });
    return st.a.result();
}

estimate ultrametric_violation_rate(const model_params& p, bool perturbed,
                                    int n_seeds, int n_triples,
                                    uint64_t master_seed, int workers) {
    auto st = run_seeds<acc_state>(n_seeds, workers, [&](uint64_t s, acc_state& acc) {
        rng_seq rs(rng_stream::for_seed(master_seed, s, field::replica));
        int viol = 0;
        auto count = [&](auto&& drawer) {
            for (int t = 0; t < n_triples; ++t) {
                configuration a = drawer(), b = drawer(), c = drawer();
                const double dab = distance_from_overlap(overlap(a, b, p));
                const double dac = distance_from_overlap(overlap(a, c, p));
                const double dbc = distance_from_overlap(overlap(b, c, p));
                const double eps = 1e-12;
                if (dab > std::max(dac, dbc) + eps || dac > std::max(dab, dbc) + eps ||
                    dbc > std::max(dab, dac) + eps)
                    ++viol;
            }
        };
        if (!perturbed || p.delta == 0.0) {
            product_gibbs g = build_product_gibbs(p, master_seed, s);
            count([&] { return g.draw(rs); });
        } else {
            gibbs_table g = build_gibbs(p, master_seed, s, true);
            g.ensure_cdf();
            count([&] { return g.draw(rs); });
        }
        acc.a.add(static_cast<double>(viol) / n_triples);
    });
    return st.a.result();
}

estimate overlap_observable(const model_params& p, bool perturbed, int s,
                            const std::vector<mono_exponent>& ks, int n_seeds,
                            int n_draws, uint64_t master_seed, int workers) {
    if (s < 2 || s > 16)
        throw remlab_error(errc::config, "replica count must be in [2,16]");
    for (const auto& e : ks)
        if (e.i < 1 || e.j <= e.i || e.j > s || e.k < 0)
            throw remlab_error(errc::config, "bad exponent index pair");
    auto st = run_seeds<acc_state>(n_seeds, workers, [&](uint64_t sd, acc_state& acc) {
        rng_seq rs(rng_stream::for_seed(master_seed, sd, field::replica));
        std::vector<configuration> reps(s);
        accumulator inner;
        auto eval = [&](auto&& drawer) {
            for (int d = 0; d < n_draws; ++d) {
                for (int r = 0; r < s; ++r) reps[r] = drawer();
                double v = 1.0;
                for (const auto& e : ks) {
                    const double q = overlap(reps[e.i - 1], reps[e.j - 1], p);
                    v *= std::pow(q, e.k);
                }
                inner.add(v);
            }
        };
        if (!perturbed || p.delta == 0.0) {
            product_gibbs g = build_product_gibbs(p, master_seed, sd);
            eval([&] { return g.draw(rs); });
        } else {
            gibbs_table g = build_gibbs(p, master_seed, sd, true);
            g.ensure_cdf();
            eval([&] { return g.draw(rs); });
        }
        acc.a.add(inner.mean);
    });
    return st.a.result();
}

} // namespace remlab
