#include "remlab/coalescent.hpp"

#include <algorithm>
#include <cmath>

#include "remlab/gibbs.hpp"
#include "remlab/parallel.hpp"

namespace remlab {

double bs_merge_rate(int b, int k) {
    if (b < 2 || k < 2 || k > b)
        throw remlab_error(errc::config, "merge rate needs 2 <= k <= b");
    return std::exp(std::lgamma(k - 1.0) + std::lgamma(b - k + 1.0) -
                    std::lgamma(static_cast<double>(b)));
}

coalescent_trajectory sample_bs_coalescent(int n, double horizon, rng_seq& rs) {
    if (n < 1 || n > kCoalescentCap)
        throw remlab_error(errc::config, "coalescent size must lie in [1, 10000]");
    if (!(horizon >= 0.0))
        throw remlab_error(errc::config, "horizon must be >= 0");
    coalescent_trajectory c;
    c.n_leaves = n;
    c.horizon = horizon;
    c.parent.assign(n, -1);
    c.birth.assign(n, 0.0);
    std::vector<int> active(n);
    for (int i = 0; i < n; ++i) active[i] = i;
    double t = 0.0;
    while (active.size() >= 2) {
        const int b = static_cast<int>(active.size());
        t += rs.expo() / (b - 1);
        if (t > horizon) break;
        // P[K <= k] = b (1 - 1/k) / (b-1), inverted in O(1).
        const double u = rs.u01();
        const double kk = 1.0 / (1.0 - u * (b - 1) / static_cast<double>(b));
        int k = std::isfinite(kk) ? static_cast<int>(std::ceil(kk)) : b;
        k = std::max(2, std::min(b, k));
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(rs.u01() * (b - i));
            j = std::min(j, b - 1);
            std::swap(active[i], active[j]);
        }
        const int node = c.n_nodes();
        c.parent.push_back(-1);
        c.birth.push_back(t);
        coalescent_event ev;
        ev.time = t;
        ev.new_block = node;
        ev.blocks_merged.assign(active.begin(), active.begin() + k);
        std::sort(ev.blocks_merged.begin(), ev.blocks_merged.end());
        for (int i = 0; i < k; ++i) c.parent[active[i]] = node;
        c.events.push_back(std::move(ev));
        active[0] = node;
        active.erase(active.begin() + 1, active.begin() + k);
    }
    c.n_final = static_cast<int>(active.size());
    return c;
}

double pair_time(const coalescent_trajectory& c, int i, int j) {
    if (i < 0 || j < 0 || i >= c.n_nodes() || j >= c.n_nodes())
        throw remlab_error(errc::config, "pair_time node out of range");
    if (i == j) return 0.0;
    int ci = i, cj = j;
    while (ci != cj) {
        if (c.birth[ci] <= c.birth[cj]) {
            ci = c.parent[ci];
            if (ci < 0) return kAboveHorizon;
        } else {
            cj = c.parent[cj];
            if (cj < 0) return kAboveHorizon;
        }
    }
    return c.birth[ci];
}

std::vector<int> blocks_at(const coalescent_trajectory& c, double t) {
    const int total = c.n_nodes();
    std::vector<int> rep(total);
    for (int id = total - 1; id >= 0; --id) {
        const int pa = c.parent[id];
        rep[id] = (pa >= 0 && c.birth[pa] <= t) ? rep[pa] : id;
    }
    rep.resize(c.n_leaves);
    return rep;
}

double assign_mark(const model_params& p, const std::vector<int>& reps, int i,
                   int j) {
    if (i == j) return 1.0;
    return reps[i] == reps[j] ? p.a1 : 0.0;
}

double mark_threshold(const model_params& p) {
    return std::log(p.beta2() / p.beta1());
}

composition compose_ppp_coalescent(const model_params& p, int n_top,
                                   uint64_t master_seed, uint64_t draw_index) {
    for (const auto& is : validate(p))
        if (is.fatal) throw remlab_error(errc::config, is.message);
    if (!(p.beta > p.beta2()))
        throw remlab_error(errc::config, "composition needs beta > beta2");
    if (n_top < 2 || n_top > kCoalescentCap)
        throw remlab_error(errc::config, "composition size must lie in [2, 10000]");
    composition cp;
    cp.prm = p;
    cp.t_star = mark_threshold(p);
    const double q = 1.0 / p.x2();
    rng_seq ga(rng_stream::for_seed(master_seed, draw_index, field::atoms));
    cp.wbar.resize(n_top);
    double gam = 0.0, sum = 0.0;
    for (int j = 0; j < n_top; ++j) {
        gam += ga.expo();
        cp.wbar[j] = std::pow(gam, -q);
        sum += cp.wbar[j];
    }
    const double tail = std::pow(gam, 1.0 - q) / (q - 1.0);
    const double tot = sum + tail;
    cp.cum.resize(n_top);
    double acc = 0.0;
    for (int j = 0; j < n_top; ++j) {
        cp.wbar[j] /= tot;
        acc += cp.wbar[j];
        cp.cum[j] = acc;
    }
    cp.tail_fraction = tail / tot;
    rng_seq gc(rng_stream::for_seed(master_seed, draw_index, field::coalescent));
    cp.traj = sample_bs_coalescent(n_top, cp.t_star, gc);
    cp.reps = blocks_at(cp.traj, cp.t_star);
    return cp;
}

double composition::mark(int i, int j) const {
    return assign_mark(prm, reps, i, j);
}

double composition::sumsq() const {
    double s = 0.0;
    for (double w : wbar) s += w * w;
    return s;
}

double composition::weight_total() const {
    double s = 0.0;
    for (double w : wbar) s += w;
    return s;
}

int64_t composition::draw_replica(rng_seq& rs, int64_t& next_fresh) const {
    const double r = rs.u01();
    if (r < cum.back()) {
        const auto it = std::upper_bound(cum.begin(), cum.end(), r);
        return static_cast<int64_t>(it - cum.begin());
    }
    return next_fresh--;
}

double composition::pair_mark(rng_seq& rs, int64_t i, int64_t j) const {
    if (i == j) return 1.0;
    if (i >= 0 && j >= 0)
        return mark(static_cast<int>(i), static_cast<int>(j));
    // A fresh tail atom merges with anything at an Exp(1) time.
    return rs.expo() <= t_star ? prm.a1 : 0.0;
}

composition_law_result composition_overlap_law(const model_params& p, int n_top,
                                               int n_draws, uint64_t master_seed,
                                               int workers) {
    struct law_state {
        accumulator bins[4], sumsq;
        void merge(const law_state& o) {
            for (int i = 0; i < 4; ++i) bins[i].merge(o.bins[i]);
            sumsq.merge(o.sumsq);
        }
    };
    const double a1 = p.a1, a2 = p.a2();
    auto st = run_seeds<law_state>(n_draws, workers, [&](uint64_t d, law_state& acc) {
        composition cp = compose_ppp_coalescent(p, n_top, master_seed, d);
        rng_seq rs(rng_stream::for_seed(master_seed, d, field::replica));
        int64_t fresh = -1;
        const int64_t r1 = cp.draw_replica(rs, fresh);
        const int64_t r2 = cp.draw_replica(rs, fresh);
        const double m = cp.pair_mark(rs, r1, r2);
        int bin = 0;
        if (m == 1.0)
            bin = 3;
        else if (m == a1)
            bin = 2;
        else if (m == a2)
            bin = 1;
        for (int i = 0; i < 4; ++i) acc.bins[i].add(i == bin ? 1.0 : 0.0);
        acc.sumsq.add(cp.sumsq());
    });
    composition_law_result out;
    for (int i = 0; i < 4; ++i) out.bins[i] = st.bins[i].result();
    out.mean_sumsq = st.sumsq.result();
    return out;
}

} // namespace remlab
