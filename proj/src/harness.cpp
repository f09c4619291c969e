#include "remlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "remlab/cascade.hpp"
#include "remlab/coalescent.hpp"
#include "remlab/eggi.hpp"
#include "remlab/extremes.hpp"
#include "remlab/gibbs.hpp"
#include "remlab/model.hpp"

namespace remlab {

const char* version_string() { return "1.0.0"; }

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

config config::parse(const std::string& text, std::string* err) {
    config c;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                if (err) *err = "line " + std::to_string(lineno) + ": unterminated section";
                return c;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (err) *err = "line " + std::to_string(lineno) + ": expected key = value";
            return c;
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            if (err) *err = "line " + std::to_string(lineno) + ": empty key";
            return c;
        }
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        c.kv[key] = value;
    }
    if (err) err->clear();
    return c;
}

config config::parse_file(const std::string& path, std::string* err) {
    std::ifstream in(path);
    if (!in) {
        if (err) *err = "cannot open config file: " + path;
        return config{};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), err);
}

std::string config::emit() const {
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

uint64_t config::digest() const {
    const std::string text = emit();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config::digest_hex() const {
    static const char* hex = "0123456789abcdef";
    uint64_t d = digest();
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hex[d & 0xf];
        d >>= 4;
    }
    return s;
}

std::string config::get_str(const std::string& key, const std::string& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

int64_t config::get_int(const std::string& key, int64_t dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        size_t pos = 0;
        const int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw remlab_error(errc::config, "key " + key + " is not an integer: " + it->second);
    }
}

double config::get_double(const std::string& key, double dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw remlab_error(errc::config, "key " + key + " is not a number: " + it->second);
    }
}

bool config::get_bool(const std::string& key, bool dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw remlab_error(errc::config, "key " + key + " is not a boolean: " + v);
}

std::string run_result::records_jsonl() const {
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

std::string run_result::records_csv() const {
    std::set<std::string> keys;
    for (const auto& r : records)
        for (auto it = r.begin(); it != r.end(); ++it) keys.insert(it.key());
    std::string out;
    bool first = true;
    for (const auto& k : keys) {
        if (!first) out += ',';
        out += k;
        first = false;
    }
    out += '\n';
    auto cell = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char ch : s) {
                    if (ch == '"') q += "\"\"";
                    else q += ch;
                }
                q += '"';
                return q;
            }
            return s;
        }
        return v.dump();
    };
    for (const auto& r : records) {
        first = true;
        for (const auto& k : keys) {
            if (!first) out += ',';
            first = false;
            if (r.contains(k)) out += cell(r.at(k));
        }
        out += '\n';
    }
    return out;
}

namespace {

model_params params_from(const config& cfg) {
    model_params p;
    p.N = static_cast<int>(cfg.get_int("model.N", p.N));
    p.a1 = cfg.get_double("model.a1", p.a1);
    p.beta = cfg.get_double("model.beta", p.beta);
    p.delta = cfg.get_double("model.delta", p.delta);
    p.alpha = cfg.get_double("model.alpha", p.alpha);
    p.n_cap = static_cast<int>(cfg.get_int("model.n_cap", p.n_cap));
    for (const auto& is : validate(p))
        if (is.fatal) throw remlab_error(errc::config, is.message);
    return p;
}

nlohmann::json base_record(const config& cfg, const model_params& p,
                           const std::string& name) {
    nlohmann::json r;
    r["name"] = name;
    r["N"] = p.N;
    r["a1"] = p.a1;
    r["beta"] = p.beta;
    r["delta"] = p.delta;
    r["alpha"] = p.alpha;
    r["digest"] = cfg.digest_hex();
    return r;
}

void put_estimate(nlohmann::json& r, const estimate& e) {
    r["mean"] = e.mean;
    r["std_error"] = e.std_error;
    r["n"] = e.n_samples;
}

struct run_ctx {
    const config& cfg;
    model_params p;
    int seeds;
    int draws;
    uint64_t master;
    int workers;
    bool perturbed;
};

const char* kBinLabels[4] = {"0", "a2", "a1", "1"};

void run_free_energy(const run_ctx& c, run_result& out) {
    const estimate fe = mean_free_energy(c.p, c.perturbed, c.seeds, c.master, c.workers);
    nlohmann::json r = base_record(c.cfg, c.p, "free_energy");
    r["perturbed"] = c.perturbed;
    put_estimate(r, fe);
    r["analytic_limit"] = analytic_free_energy(c.p.beta, c.p);
    out.records.push_back(std::move(r));
}

void run_overlaps(const run_ctx& c, run_result& out) {
    const auto bins = overlap_histogram(c.p, c.perturbed, c.seeds, c.master, c.workers);
    const double x1 = c.p.x1(), x2 = c.p.x2();
    const bool limit_valid = c.p.beta > c.p.beta2();
    const double ref[4] = {x1, 0.0, x2 - x1, 1.0 - x2};
    for (int b = 0; b < 4; ++b) {
        nlohmann::json r = base_record(c.cfg, c.p, "overlap_bin");
        r["bin"] = kBinLabels[b];
        r["perturbed"] = c.perturbed;
        put_estimate(r, bins[b]);
        if (limit_valid) r["limit"] = ref[b];
        out.records.push_back(std::move(r));
    }
}

void run_ultrametric(const run_ctx& c, run_result& out) {
    const int triples = c.draws > 0 ? c.draws : 64;
    const estimate rate = ultrametric_violation_rate(c.p, c.perturbed, c.seeds,
                                                     triples, c.master, c.workers);
    nlohmann::json r = base_record(c.cfg, c.p, "ultrametric_violation_rate");
    r["perturbed"] = c.perturbed;
    r["triples_per_seed"] = triples;
    put_estimate(r, rate);
    out.records.push_back(std::move(r));
}

void run_extremes(const run_ctx& c, run_result& out) {
    const std::string mode = c.cfg.get_str("extremes.mode", "window");
    if (mode == "window") {
        const double lo1 = c.cfg.get_double("extremes.lo1", 0.0);
        const double hi1 = c.cfg.get_double("extremes.hi1", 1.0);
        const double lo2 = c.cfg.get_double("extremes.lo2", 0.0);
        const double hi2 = c.cfg.get_double("extremes.hi2", 1.0);
        const estimate cnt = window_count(c.p, c.perturbed, lo1, hi1, lo2, hi2,
                                          c.seeds, c.master, c.workers);
        const double ref = window_reference(c.p, lo1, hi1, lo2, hi2);
        nlohmann::json r = base_record(c.cfg, c.p, "window_count");
        r["perturbed"] = c.perturbed;
        r["lo1"] = lo1;
        r["hi1"] = hi1;
        r["lo2"] = lo2;
        r["hi2"] = hi2;
        put_estimate(r, cnt);
        r["reference"] = ref;
        r["rel_dev"] = cnt.mean / ref - 1.0;
        out.records.push_back(std::move(r));
    } else if (mode == "blockmax") {
        const int block = static_cast<int>(c.cfg.get_int("extremes.block", 1));
        const std::string cm = c.cfg.get_str("extremes.center", "quantile");
        if (cm != "quantile" && cm != "formula")
            throw remlab_error(errc::config, "extremes.center must be quantile or formula");
        const center_mode m = cm == "quantile" ? center_mode::quantile : center_mode::formula;
        auto xs = block_max_sample(c.p, block, c.seeds, c.master, m, c.workers);
        const double bl = block == 1 ? c.p.beta1() : c.p.beta2();
        nlohmann::json r = base_record(c.cfg, c.p, "block_max_ks");
        r["block"] = block;
        r["center"] = cm;
        r["ks"] = ks_gumbel(std::move(xs), bl);
        r["n"] = c.seeds;
        out.records.push_back(std::move(r));
    } else if (mode == "topk") {
        const int k = static_cast<int>(c.cfg.get_int("extremes.k", 10));
        for (int s = 0; s < c.seeds; ++s) {
            const marked_point_process mpp =
                top_k_shifted(c.p, c.master, static_cast<uint64_t>(s), c.perturbed, k);
            nlohmann::json r = base_record(c.cfg, c.p, "top_k");
            r["seed"] = s;
            r["perturbed"] = c.perturbed;
            nlohmann::json vals = nlohmann::json::array();
            nlohmann::json ids = nlohmann::json::array();
            for (const auto& mp : mpp.points) {
                vals.push_back(mp.value);
                ids.push_back(mp.id);
            }
            r["values"] = std::move(vals);
            r["ids"] = std::move(ids);
            out.records.push_back(std::move(r));
        }
    } else if (mode == "localization") {
        const double lo = c.cfg.get_double("extremes.lo", -2.0);
        const double hi = c.cfg.get_double("extremes.hi", 2.0);
        const double mlo = c.cfg.get_double("extremes.mlo", -6.0);
        const double mhi = c.cfg.get_double("extremes.mhi", 6.0);
        const estimate rate = localization_rate(c.p, c.perturbed, lo, hi, mlo, mhi,
                                                c.seeds, c.master, c.workers);
        nlohmann::json r = base_record(c.cfg, c.p, "localization_rate");
        r["perturbed"] = c.perturbed;
        r["lo"] = lo;
        r["hi"] = hi;
        r["mlo"] = mlo;
        r["mhi"] = mhi;
        put_estimate(r, rate);
        out.records.push_back(std::move(r));
    } else {
        throw remlab_error(errc::config, "unknown extremes.mode: " + mode);
    }
}

void run_forbidden(const run_ctx& c, run_result& out) {
    const double lo = c.cfg.get_double("forbidden.lo", -2.0);
    const double hi = c.cfg.get_double("forbidden.hi", 2.0);
    std::vector<double> alphas;
    const std::string sweep = c.cfg.get_str("forbidden.alphas", "");
    if (sweep.empty()) {
        alphas.push_back(c.p.alpha);
    } else {
        std::istringstream ss(sweep);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) alphas.push_back(std::stod(tok));
        }
        if (alphas.empty())
            throw remlab_error(errc::config, "forbidden.alphas has no values");
    }
    for (double a : alphas) {
        model_params p = c.p;
        p.alpha = a;
        for (const auto& is : validate(p))
            if (is.fatal) throw remlab_error(errc::config, is.message);
        const forbidden_stats fs =
            forbidden_pairs(p, c.perturbed, lo, hi, c.seeds, c.master, c.workers);
        nlohmann::json r = base_record(c.cfg, p, "forbidden_pairs");
        r["alpha"] = a;
        r["perturbed"] = c.perturbed;
        r["lo"] = lo;
        r["hi"] = hi;
        put_estimate(r, fs.event_rate);
        r["mean_pairs"] = fs.mean_pairs.mean;
        r["mean_pairs_se"] = fs.mean_pairs.std_error;
        out.records.push_back(std::move(r));
    }
}

void run_cascade(const run_ctx& c, run_result& out) {
    const double eps = c.cfg.get_double("cascade.eps", 1e-6);
    const int draws = c.draws > 0 ? c.draws : 20000;
    const cascade_law_result law =
        cascade_overlap_law(c.p, eps, draws, c.master, c.workers);
    const double x1 = c.p.x1(), x2 = c.p.x2();
    const double ref[4] = {x1, 0.0, x2 - x1, 1.0 - x2};
    for (int b = 0; b < 4; ++b) {
        nlohmann::json r = base_record(c.cfg, c.p, "cascade_bin");
        r["bin"] = kBinLabels[b];
        put_estimate(r, law.bins[b]);
        r["limit"] = ref[b];
        out.records.push_back(std::move(r));
    }
    nlohmann::json r = base_record(c.cfg, c.p, "cascade_mean_sumsq");
    put_estimate(r, law.mean_sumsq);
    r["limit"] = 1.0 - x2;
    out.records.push_back(std::move(r));
}

void run_coalescent(const run_ctx& c, run_result& out) {
    const int n_top = static_cast<int>(c.cfg.get_int("coalescent.n_top", 2048));
    const int draws = c.draws > 0 ? c.draws : 20000;
    const composition_law_result law =
        composition_overlap_law(c.p, n_top, draws, c.master, c.workers);
    const double x1 = c.p.x1(), x2 = c.p.x2();
    const double ref[4] = {x1, 0.0, x2 - x1, 1.0 - x2};
    for (int b = 0; b < 4; ++b) {
        nlohmann::json r = base_record(c.cfg, c.p, "composition_bin");
        r["bin"] = kBinLabels[b];
        put_estimate(r, law.bins[b]);
        r["limit"] = ref[b];
        out.records.push_back(std::move(r));
    }
    nlohmann::json r = base_record(c.cfg, c.p, "composition_mean_sumsq");
    put_estimate(r, law.mean_sumsq);
    r["limit"] = 1.0 - x2;
    r["t_star"] = mark_threshold(c.p);
    out.records.push_back(std::move(r));
}

void run_eggi(const run_ctx& c, run_result& out) {
    const std::string source = c.cfg.get_str("eggi.source", "gibbs");
    const observable f = observable::parse(c.cfg.get_str("eggi.f", "mono:k12=1"));
    const observable g = observable::parse(c.cfg.get_str("eggi.g", "mono:k12=1"));
    eggi_options opt;
    opt.s = static_cast<int>(c.cfg.get_int("eggi.s", 2));
    opt.n_realizations = c.seeds;
    opt.n_inner = c.draws > 0 ? c.draws : 200;
    opt.n_blocks = static_cast<int>(c.cfg.get_int("eggi.blocks", 20));
    eggi_result res;
    if (source == "gibbs") {
        gibbs_replica_source src(c.p, c.master, true);
        res = eggi_residual(src, c.p, f, g, opt);
    } else if (source == "gibbs-unperturbed") {
        gibbs_replica_source src(c.p, c.master, false);
        res = eggi_residual(src, c.p, f, g, opt);
    } else if (source == "cascade") {
        cascade_replica_source src(c.p, c.cfg.get_double("cascade.eps", 1e-6), c.master);
        res = eggi_residual(src, c.p, f, g, opt);
    } else {
        throw remlab_error(errc::config, "unknown eggi.source: " + source);
    }
    nlohmann::json r = base_record(c.cfg, c.p, "eggi_residual");
    r["source"] = source;
    r["s"] = opt.s;
    r["f"] = c.cfg.get_str("eggi.f", "mono:k12=1");
    r["g"] = c.cfg.get_str("eggi.g", "mono:k12=1");
    put_estimate(r, res.residual);
    r["term_new"] = res.term_new;
    r["term_prod"] = res.term_prod;
    r["term_sum"] = res.term_sum;
    out.records.push_back(std::move(r));
}

void run_ibp(const run_ctx& c, run_result& out) {
    const int p_power = static_cast<int>(c.cfg.get_int("ibp.p", 2));
    const int s = static_cast<int>(c.cfg.get_int("ibp.s", 1));
    const int f_power = static_cast<int>(c.cfg.get_int("ibp.f_power", 0));
    const double delta_n = c.cfg.get_double("ibp.delta_n", default_ibp_delta(c.p));
    const double b_p = c.cfg.get_double("ibp.b_p", 1.0);
    const double beta_base = c.cfg.get_double("ibp.beta_base", c.p.beta1());
    const bool hook = c.cfg.get_bool("ibp.uniform_hook", false);
    const ibp_result res = ibp_check(c.p, p_power, s, f_power, delta_n, b_p,
                                     beta_base, c.seeds, c.master, c.workers, hook);
    nlohmann::json r = base_record(c.cfg, c.p, "ibp_check");
    r["p"] = p_power;
    r["s"] = s;
    r["f_power"] = f_power;
    r["delta_n"] = delta_n;
    r["b_p"] = b_p;
    r["beta_base"] = beta_base;
    r["lhs"] = res.lhs.mean;
    r["lhs_se"] = res.lhs.std_error;
    r["rhs"] = res.rhs.mean;
    r["rhs_se"] = res.rhs.std_error;
    put_estimate(r, res.diff);
    out.records.push_back(std::move(r));
}

} // namespace

run_result run_experiment(const config& cfg) {
    run_result out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::string kind = cfg.get_str("run.kind", "");
        if (kind.empty())
            throw remlab_error(errc::config, "run.kind is required");
        run_ctx c{cfg,
                  params_from(cfg),
                  static_cast<int>(cfg.get_int("run.seeds", 100)),
                  static_cast<int>(cfg.get_int("run.draws", 0)),
                  static_cast<uint64_t>(cfg.get_int("run.master_seed", 1)),
                  static_cast<int>(cfg.get_int("run.workers", 1)),
                  cfg.get_bool("run.perturbed", true)};
        if (c.seeds < 1) throw remlab_error(errc::config, "run.seeds must be >= 1");
        if (c.workers < 1 || c.workers > 64)
            throw remlab_error(errc::config, "run.workers must lie in [1, 64]");
        if (kind == "free-energy")
            run_free_energy(c, out);
        else if (kind == "overlaps")
            run_overlaps(c, out);
        else if (kind == "ultrametric")
            run_ultrametric(c, out);
        else if (kind == "extremes")
            run_extremes(c, out);
        else if (kind == "forbidden-pairs")
            run_forbidden(c, out);
        else if (kind == "cascade")
            run_cascade(c, out);
        else if (kind == "coalescent")
            run_coalescent(c, out);
        else if (kind == "eggi")
            run_eggi(c, out);
        else if (kind == "ibp")
            run_ibp(c, out);
        else
            throw remlab_error(errc::config, "unknown run.kind: " + kind);
        out.summary["kind"] = kind;
    } catch (const remlab_error& e) {
        out.status = static_cast<int>(e.code);
        out.error = e.what();
    } catch (const std::exception& e) {
        out.status = static_cast<int>(errc::internal);
        out.error = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.summary["digest"] = cfg.digest_hex();
    out.summary["version"] = version_string();
    out.summary["n_records"] = out.records.size();
    out.summary["status"] = out.status;
    if (!out.error.empty()) out.summary["error"] = out.error;
    // Wall time is reporting only; determinism checks must ignore it.
    out.summary["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return out;
}

} // namespace remlab
