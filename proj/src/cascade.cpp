#include "remlab/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "remlab/gibbs.hpp"
#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"

namespace remlab {

namespace {

constexpr uint64_t kMaxSeries = 1ull << 24;

// Mean of sum_{k > K} Gamma_k^{-q} given the last materialized point: beyond
// it the series is a unit-rate Poisson process, so the conditional mean is
// exactly the intensity integral (q > 1).
double tail_mean(double gamma_last, double q) {
    return std::pow(gamma_last, 1.0 - q) / (q - 1.0);
}

// Upper bound on sum_{k > K} Gamma_k^{-2q} (collision mass of the tail).
double tail_sq(double gamma_last, double q) {
    return std::pow(gamma_last, 1.0 - 2.0 * q) / (2.0 * q - 1.0);
}

// Variance of the tail sum around its conditional mean.
double tail_var(double gamma_last, double q) {
    return 0.5 * q * std::pow(gamma_last, -2.0 * q);
}

} // namespace

double cascade_realization::sum_wbar_sq() const {
    double s = 0.0;
    for (double w : atom_w) {
        const double wb = w / T;
        s += wb * wb;
    }
    return s;
}

cascade_realization sample_cascade(const model_params& p, double eps,
                                   uint64_t master_seed, uint64_t draw_index,
                                   double list_budget) {
    for (const auto& is : validate(p))
        if (is.fatal) throw remlab_error(errc::config, is.message);
    if (!(eps > 0.0 && eps <= 1e-2))
        throw remlab_error(errc::config, "cascade eps must lie in (0, 1e-2]");
    if (!(p.beta > p.beta2()))
        throw remlab_error(errc::config,
                           "normalized cascade needs beta > beta2 (divergent mass otherwise)");
    if (!(list_budget >= 1.0))
        throw remlab_error(errc::config, "list budget must be >= 1");

    cascade_realization c;
    c.beta = p.beta;
    c.x1 = p.x1();
    c.x2 = p.x2();
    c.eps = eps;
    const double b1 = p.beta1(), b2 = p.beta2();
    c.L1 = -std::log(list_budget) / b1;
    c.L2 = -std::log(list_budget) / b2;

    // First-level series u_k = Gamma_k^{-1/x1}; label masses u^{x2} =
    // Gamma^{-q} with q = x2/x1 > 1.
    const double q_lab = c.x2 / c.x1;
    rng_seq gp(rng_stream::for_seed(master_seed, draw_index, field::parents));
    const double parent_cut = list_budget;  // Gamma <= cut  <=>  xi1 >= L1
    double gam = 0.0, sum_ux2 = 0.0;
    double lab_coll = 0.0, lab_fluct2 = 0.0;
    while (true) {
        gam += gp.expo();
        c.parent_u.push_back(std::pow(gam, -1.0 / c.x1));
        sum_ux2 += std::pow(gam, -q_lab);
        const size_t k = c.parent_u.size();
        if (k % 128 == 0 || k == 64) {
            if (gam < parent_cut || k < 64) continue;
            const double u_est = sum_ux2 + tail_mean(gam, q_lab);
            lab_coll = tail_sq(gam, q_lab) / (u_est * u_est);
            lab_fluct2 = tail_var(gam, q_lab) / (u_est * u_est);
            if (lab_coll <= 0.45 * eps && lab_fluct2 <= 0.05 * eps) break;
        }
        if (c.parent_u.size() >= kMaxSeries)
            throw remlab_error(errc::resource, "first-level series budget exceeded");
    }
    c.parent_tail_mean = tail_mean(gam, q_lab);
    c.U = sum_ux2 + c.parent_tail_mean;

    // Atom series: PPP(x2 U w^{-x2-1}) ranked, i.e. w_j = (U)^{1/x2} *
    // Gamma'_j^{-1/x2}.
    const double q_atom = 1.0 / c.x2;
    const double scale = std::pow(c.U, q_atom);
    rng_seq ga(rng_stream::for_seed(master_seed, draw_index, field::atoms));
    double gam_a = 0.0, sum_w = 0.0;
    double atom_coll = 0.0, atom_fluct2 = 0.0;
    while (true) {
        gam_a += ga.expo();
        c.atom_w.push_back(scale * std::pow(gam_a, -q_atom));
        sum_w += c.atom_w.back();
        const size_t j = c.atom_w.size();
        if (j % 128 == 0 || j == 64) {
            if (j < 64) continue;
            const double t_est = sum_w + scale * tail_mean(gam_a, q_atom);
            atom_coll = scale * scale * tail_sq(gam_a, q_atom) / (t_est * t_est);
            atom_fluct2 = scale * scale * tail_var(gam_a, q_atom) / (t_est * t_est);
            if (atom_coll <= 0.45 * eps && atom_fluct2 <= 0.05 * eps) break;
        }
        if (c.atom_w.size() >= kMaxSeries)
            throw remlab_error(errc::resource, "atom series budget exceeded");
    }
    c.atom_tail_mean = scale * tail_mean(gam_a, q_atom);
    c.T = sum_w + c.atom_tail_mean;
    c.neglected_mass_bound = lab_coll + atom_coll + lab_fluct2 + atom_fluct2;

    // Labels, i.i.d. proportional to u^{x2} with the tail lumped as fresh
    // distinct parents (ids -(j+1), unique per atom).
    rng_seq gl(rng_stream::for_seed(master_seed, draw_index, field::labels));
    std::vector<double> cum_u(c.parent_u.size());
    double acc = 0.0;
    for (size_t k = 0; k < c.parent_u.size(); ++k) {
        acc += std::pow(c.parent_u[k], c.x2);
        cum_u[k] = acc;
    }
    c.atom_label.resize(c.atom_w.size());
    for (size_t j = 0; j < c.atom_w.size(); ++j) {
        const double r = gl.u01() * c.U;
        if (r < acc) {
            const auto it = std::upper_bound(cum_u.begin(), cum_u.end(), r);
            c.atom_label[j] = static_cast<int64_t>(it - cum_u.begin());
        } else {
            c.atom_label[j] = -static_cast<int64_t>(j) - 1;
        }
    }

    // Threshold lists. First level is the parent series above L1; child
    // increments are drawn per listed parent on their own substream (exact in
    // law given the parents).
    rng_stream gc = rng_stream::for_seed(master_seed, draw_index, field::children);
    const double child_cut = list_budget;  // Gamma'' <= cut  <=>  xi2 >= L2
    for (size_t k = 0; k < c.parent_u.size(); ++k) {
        const double xi1 = std::log(c.parent_u[k]) / c.beta;
        if (xi1 < c.L1) break;
        c.xi1.push_back(xi1);
        std::vector<double> kids;
        double g = 0.0;
        for (uint64_t j = 0;; ++j) {
            g += gc.expo((static_cast<uint64_t>(k) << 32) | j);
            if (g > child_cut) break;
            kids.push_back(-std::log(g) / b2);
        }
        c.xi2.push_back(std::move(kids));
    }
    return c;
}

cascade_sampler::cascade_sampler(const cascade_realization& real) : r(&real) {
    next_fresh = -static_cast<int64_t>(real.atom_w.size()) - 1;
    cum_w.resize(real.atom_w.size());
    double acc = 0.0;
    for (size_t j = 0; j < real.atom_w.size(); ++j) {
        acc += real.atom_w[j];
        cum_w[j] = acc;
    }
    cum_u.resize(real.parent_u.size());
    acc = 0.0;
    for (size_t k = 0; k < real.parent_u.size(); ++k) {
        acc += std::pow(real.parent_u[k], real.x2);
        cum_u[k] = acc;
    }
}

cascade_replica cascade_sampler::draw(rng_seq& rs) {
    cascade_replica rep;
    const double rw = rs.u01() * r->T;
    if (!cum_w.empty() && rw < cum_w.back()) {
        const auto it = std::upper_bound(cum_w.begin(), cum_w.end(), rw);
        rep.atom = static_cast<int64_t>(it - cum_w.begin());
        rep.label = r->atom_label[rep.atom];
        return rep;
    }
    // Tail atom: fresh distinct atom, parent label from the exact label law.
    rep.atom = next_fresh--;
    const double ru = rs.u01() * r->U;
    if (!cum_u.empty() && ru < cum_u.back()) {
        const auto it = std::upper_bound(cum_u.begin(), cum_u.end(), ru);
        rep.label = static_cast<int64_t>(it - cum_u.begin());
    } else {
        rep.label = next_fresh--;
    }
    return rep;
}

double cascade_mark(const model_params& p, const cascade_replica& a,
                    const cascade_replica& b) {
    if (a.atom == b.atom) return 1.0;
    if (a.label == b.label) return p.a1;
    return 0.0;
}

double normalized_weights::total() const {
    double s = tail_fraction;
    for (double w : wbar) s += w;
    return s;
}

double normalized_weights::sumsq() const {
    double s = 0.0;
    for (double w : wbar) s += w * w;
    return s;
}

normalized_weights multiplicative_and_normalize(const cascade_realization& c,
                                                double beta, double shift) {
    if (std::abs(beta - c.beta) > 1e-12 * std::max(1.0, std::abs(beta)))
        throw remlab_error(errc::config,
                           "realization holds masses built at a different beta");
    const double scale = std::exp(beta * shift);
    normalized_weights out;
    out.wbar.resize(c.atom_w.size());
    double sum = 0.0;
    for (size_t j = 0; j < c.atom_w.size(); ++j) {
        out.wbar[j] = c.atom_w[j] * scale;
        sum += out.wbar[j];
    }
    const double tail = c.atom_tail_mean * scale;
    const double tot = sum + tail;
    for (double& w : out.wbar) w /= tot;
    out.tail_fraction = tail / tot;
    return out;
}

cascade_law_result cascade_overlap_law(const model_params& p, double eps,
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
        cascade_realization c = sample_cascade(p, eps, master_seed, d);
        cascade_sampler smp(c);
        rng_seq rs(rng_stream::for_seed(master_seed, d, field::replica));
        const cascade_replica r1 = smp.draw(rs), r2 = smp.draw(rs);
        const double m = cascade_mark(p, r1, r2);
        int bin = 0;
        if (m == 1.0)
            bin = 3;
        else if (m == a1)
            bin = 2;
        else if (m == a2)
            bin = 1;
        for (int i = 0; i < 4; ++i) acc.bins[i].add(i == bin ? 1.0 : 0.0);
        acc.sumsq.add(c.sum_wbar_sq());
    });
    cascade_law_result out;
    for (int i = 0; i < 4; ++i) out.bins[i] = st.bins[i].result();
    out.mean_sumsq = st.sumsq.result();
    return out;
}

} // namespace remlab
