#include "remlab/eggi.hpp"

#include <algorithm>
#include <cmath>

#include "remlab/parallel.hpp"

namespace remlab {

namespace {

int parse_digit(char c, const std::string& text) {
    if (c < '1' || c > '9')
        throw remlab_error(errc::config, "bad replica index in observable: " + text);
    return c - '0';
}

} // namespace

observable observable::parse(const std::string& text) {
    observable o;
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw remlab_error(errc::config, "observable needs a 'mono:' or 'ind:' prefix");
    const std::string head = text.substr(0, colon);
    std::string body = text.substr(colon + 1);
    if (head == "mono") {
        o.k = kind::monomial;
        size_t pos = 0;
        while (pos < body.size()) {
            size_t end = body.find(',', pos);
            if (end == std::string::npos) end = body.size();
            const std::string item = body.substr(pos, end - pos);
            pos = end + 1;
            if (item.empty()) continue;
            if (item.size() < 5 || item[0] != 'k' || item[3] != '=')
                throw remlab_error(errc::config, "bad monomial term: " + item);
            term t;
            t.i = parse_digit(item[1], text);
            t.j = parse_digit(item[2], text);
            t.power = std::stoi(item.substr(4));
            if (t.i >= t.j || t.power < 1)
                throw remlab_error(errc::config, "bad monomial term: " + item);
            o.terms.push_back(t);
        }
        if (o.total_power() > 4)
            throw remlab_error(errc::config, "monomial total power must be <= 4");
        return o;
    }
    if (head == "ind") {
        o.k = kind::indicator;
        const auto eq = body.find('=');
        if (eq == std::string::npos || eq < 3 || body[0] != 'q')
            throw remlab_error(errc::config, "bad indicator: " + text);
        o.qi = parse_digit(body[1], text);
        o.qj = parse_digit(body[2], text);
        if (o.qi >= o.qj)
            throw remlab_error(errc::config, "bad indicator pair: " + text);
        o.ind_value = body.substr(eq + 1);
        if (o.ind_value != "0" && o.ind_value != "a2" && o.ind_value != "a1" &&
            o.ind_value != "1")
            throw remlab_error(errc::config,
                               "indicator value must be one of 0, a2, a1, 1");
        return o;
    }
    throw remlab_error(errc::config, "unknown observable kind: " + head);
}

int observable::max_replica() const {
    int m = 1;
    if (k == kind::indicator) return std::max(m, qj);
    for (const auto& t : terms) m = std::max(m, t.j);
    return m;
}

int observable::total_power() const {
    int s = 0;
    for (const auto& t : terms) s += t.power;
    return s;
}

double observable::indicator_level(const model_params& p) const {
    if (ind_value == "1") return 1.0;
    if (ind_value == "a1") return p.a1;
    if (ind_value == "a2") return p.a2();
    return 0.0;
}

double observable::eval(const model_params& p, const double* q, int s) const {
    if (k == kind::indicator) {
        const double qv = q[(qi - 1) * s + (qj - 1)];
        return std::abs(qv - indicator_level(p)) < 1e-9 ? 1.0 : 0.0;
    }
    double v = 1.0;
    for (const auto& t : terms) {
        const double qv = q[(t.i - 1) * s + (t.j - 1)];
        double f = 1.0;
        for (int r = 0; r < t.power; ++r) f *= qv;
        v *= f;
    }
    return v;
}

double observable::eval_scalar(const model_params& p, double qv) const {
    if (k == kind::indicator)
        return std::abs(qv - indicator_level(p)) < 1e-9 ? 1.0 : 0.0;
    double v = 1.0;
    for (const auto& t : terms)
        for (int r = 0; r < t.power; ++r) v *= qv;
    return v;
}

gibbs_replica_source::gibbs_replica_source(const model_params& params,
                                           uint64_t master, bool pert)
    : p(params), master_seed(master), perturbed(pert) {
    use_product = !perturbed || p.delta == 0.0;
}

void gibbs_replica_source::start_realization(uint64_t index) {
    if (use_product) {
        pg = build_product_gibbs(p, master_seed, index);
    } else {
        gt = build_gibbs(p, master_seed, index, true);
        gt.ensure_cdf();
    }
    rs = rng_seq(rng_stream::for_seed(master_seed, index, field::replica));
}

void gibbs_replica_source::fill_overlaps(int count, double* q) {
    cfg.resize(count);
    for (int i = 0; i < count; ++i)
        cfg[i] = use_product ? pg.draw(rs) : gt.draw(rs);
    for (int i = 0; i < count; ++i) {
        q[i * count + i] = 1.0;
        for (int j = i + 1; j < count; ++j) {
            const double qv = overlap(cfg[i], cfg[j], p);
            q[i * count + j] = qv;
            q[j * count + i] = qv;
        }
    }
}

cascade_replica_source::cascade_replica_source(const model_params& params,
                                               double eps_val, uint64_t master)
    : p(params), eps(eps_val), master_seed(master) {}

void cascade_replica_source::start_realization(uint64_t index) {
    real = sample_cascade(p, eps, master_seed, index);
    smp = std::make_unique<cascade_sampler>(real);
    rs = rng_seq(rng_stream::for_seed(master_seed, index, field::replica));
}

void cascade_replica_source::fill_overlaps(int count, double* q) {
    rep.resize(count);
    for (int i = 0; i < count; ++i) rep[i] = smp->draw(rs);
    for (int i = 0; i < count; ++i) {
        q[i * count + i] = 1.0;
        for (int j = i + 1; j < count; ++j) {
            const double m = cascade_mark(p, rep[i], rep[j]);
            q[i * count + j] = m;
            q[j * count + i] = m;
        }
    }
}

eggi_result eggi_residual(replica_source& src, const model_params& p,
                          const observable& f, const observable& g,
                          const eggi_options& opt) {
    const int s = opt.s;
    if (s < 2 || s > 8) throw remlab_error(errc::config, "eggi needs 2 <= s <= 8");
    if (f.max_replica() > s)
        throw remlab_error(errc::config, "f references replicas beyond s");
    if (g.max_replica() > 2 || (g.k == observable::kind::monomial &&
                                !std::all_of(g.terms.begin(), g.terms.end(),
                                             [](const observable::term& t) {
                                                 return t.i == 1 && t.j == 2;
                                             })))
        throw remlab_error(errc::config, "g must depend on a single overlap");
    if (opt.n_realizations < 2 * opt.n_blocks)
        throw remlab_error(errc::config, "need at least two realizations per block");

    const int m = s + 1;
    std::vector<double> q(m * m);
    struct real_stats {
        double a = 0.0;   // <f g(q_{1,s+1})>
        double b = 0.0;   // <f>
        double c = 0.0;   // <g(q_{12})>
        double d = 0.0;   // sum_{l=2}^s <f g(q_{1l})>
    };
    std::vector<real_stats> rsv(opt.n_realizations);
    for (int r = 0; r < opt.n_realizations; ++r) {
        src.start_realization(static_cast<uint64_t>(r));
        real_stats st;
        for (int it = 0; it < opt.n_inner; ++it) {
            src.fill_overlaps(m, q.data());
            const double fv = f.eval(p, q.data(), m);
            st.a += fv * g.eval_scalar(p, q[0 * m + s]);
            st.b += fv;
            st.c += g.eval_scalar(p, q[0 * m + 1]);
            for (int l = 2; l <= s; ++l)
                st.d += fv * g.eval_scalar(p, q[0 * m + (l - 1)]);
        }
        const double inv = 1.0 / opt.n_inner;
        st.a *= inv;
        st.b *= inv;
        st.c *= inv;
        st.d *= inv;
        rsv[r] = st;
    }
    // Per-block residuals; split-half product inside each block.
    accumulator blocks;
    double t_new = 0.0, t_prod = 0.0, t_sum = 0.0;
    const int nb = opt.n_blocks;
    for (int b = 0; b < nb; ++b) {
        const int lo = static_cast<int>(static_cast<int64_t>(b) * opt.n_realizations / nb);
        const int hi = static_cast<int>(static_cast<int64_t>(b + 1) * opt.n_realizations / nb);
        double a = 0.0, d = 0.0;
        double be = 0.0, bo = 0.0, ce = 0.0, co = 0.0;
        int ne = 0, no = 0;
        for (int r = lo; r < hi; ++r) {
            a += rsv[r].a;
            d += rsv[r].d;
            if ((r - lo) % 2 == 0) {
                be += rsv[r].b;
                ce += rsv[r].c;
                ++ne;
            } else {
                bo += rsv[r].b;
                co += rsv[r].c;
                ++no;
            }
        }
        const int n = hi - lo;
        a /= n;
        d /= n;
        const double prod =
            0.5 * ((be / ne) * (co / no) + (bo / no) * (ce / ne));
        const double res = a - prod / s - d / s;
        blocks.add(res);
        t_new += a;
        t_prod += prod;
        t_sum += d;
    }
    eggi_result out;
    out.residual = blocks.result();
    out.term_new = t_new / nb;
    out.term_prod = t_prod / nb;
    out.term_sum = t_sum / nb;
    return out;
}

p_field::p_field(const model_params& p, int pw, uint64_t master_seed,
                 uint64_t seed_index)
    : prm(p), power(pw) {
    if (pw < 1) throw remlab_error(errc::config, "field power must be >= 1");
    const double a1p = std::pow(p.a1, pw), a2p = std::pow(p.a2(), pw);
    u = std::sqrt(p.N * a1p);
    v = std::sqrt(p.N * a2p);
    w = std::sqrt(p.N * std::max(0.0, 1.0 - a1p - a2p));
    f1 = rng_stream::for_seed(master_seed, seed_index, field::pfield1);
    f2 = rng_stream::for_seed(master_seed, seed_index, field::pfield2);
    f12 = rng_stream::for_seed(master_seed, seed_index, field::pfield12);
}

ibp_result ibp_check(const model_params& prm, int p_power, int s, int f_power,
                     double delta_n, double b_p, double beta_base, int n_seeds,
                     uint64_t master_seed, int workers, bool uniform_hook) {
    if (s != 1 && s != 2)
        throw remlab_error(errc::config, "ibp check supports s = 1 or 2");
    if (s == 1 && f_power != 0)
        throw remlab_error(errc::config, "s = 1 requires f == 1");
    if (p_power < 1 || f_power < 0)
        throw remlab_error(errc::config, "bad powers in ibp check");
    if (delta_n < 0.0)
        throw remlab_error(errc::config, "delta_n must be >= 0");
    model_params base = prm;
    base.beta = beta_base;

    struct ibp_state {
        accumulator lhs, rhs, diff;
        void merge(const ibp_state& o) {
            lhs.merge(o.lhs);
            rhs.merge(o.rhs);
            diff.merge(o.diff);
        }
    };
    const double coef = std::sqrt(delta_n) * b_p;
    auto st = run_seeds<ibp_state>(n_seeds, workers, [&](uint64_t sd, ibp_state& acc) {
        p_field y(prm, p_power, master_seed, sd);
        const bool tilt = !uniform_hook && delta_n > 0.0;
        gibbs_table t = build_gibbs(
            base, master_seed, sd, false, uniform_hook,
            tilt ? std::function<double(uint64_t)>(
                       [&](uint64_t flat) { return coef * y.value(flat); })
                 : std::function<double(uint64_t)>());
        double lhs_r = 0.0;
        const uint64_t total = prm.config_count();
        for (uint64_t flat = 0; flat < total; ++flat) {
            const double ps = t.prob[flat];
            if (ps == 0.0) continue;
            const double pv = delta_n > 0.0 ? coef * y.value(flat) : y.value(flat);
            const double fv = f_power > 0 ? t.h_mono(flat, f_power) : 1.0;
            lhs_r += ps * pv * fv;
        }
        lhs_r /= delta_n > 0.0 ? delta_n * prm.N : static_cast<double>(prm.N);

        double rhs_r;
        if (s == 1) {
            double hp = 0.0;
            for (uint64_t flat = 0; flat < total; ++flat)
                hp += t.prob[flat] * t.h_mono(flat, p_power);
            rhs_r = b_p * b_p * (1.0 - hp);
        } else {
            double qk = 0.0, qpk = 0.0, qpqk = 0.0;
            for (uint64_t flat = 0; flat < total; ++flat) {
                const double ps = t.prob[flat];
                const double hk = f_power > 0 ? t.h_mono(flat, f_power) : 1.0;
                qk += ps * hk;
                qpk += ps * (f_power > 0 ? t.h_mono(flat, p_power + f_power)
                                         : t.h_mono(flat, p_power));
                qpqk += ps * t.h_mono(flat, p_power) * hk;
            }
            rhs_r = b_p * b_p * (qk + qpk - 2.0 * qpqk);
        }
        acc.lhs.add(lhs_r);
        acc.rhs.add(rhs_r);
        acc.diff.add(lhs_r - rhs_r);
    });
    ibp_result out;
    out.lhs = st.lhs.result();
    out.rhs = st.rhs.result();
    out.diff = st.diff.result();
    out.delta_n = delta_n;
    out.b_p = b_p;
    out.beta_base = beta_base;
    out.p_power = p_power;
    out.s = s;
    out.f_power = f_power;
    return out;
}

} // namespace remlab
