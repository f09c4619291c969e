#include "remlab/model.hpp"

#include <cmath>

namespace remlab {

namespace {
constexpr double kLog2 = 0.6931471805599453;
}

double model_params::beta1() const { return std::sqrt(kLog2 / a1); }
double model_params::beta2() const { return std::sqrt(kLog2 / a2()); }
double model_params::omega() const { return omega_schedule(N, alpha); }

double omega_schedule(int N, double alpha) {
    return alpha * std::log(static_cast<double>(N)) / static_cast<double>(N);
}

std::vector<param_issue> validate(const model_params& p) {
    std::vector<param_issue> out;
    if (p.N < 4) out.push_back({true, "N must be at least 4"});
    if (p.N % 2 != 0) out.push_back({true, "N must be even"});
    if (p.N > p.n_cap) out.push_back({true, "N exceeds the configured cap"});
    if (!(p.a1 > 0.5 && p.a1 < 1.0))
        out.push_back({true, "a1 must lie in (1/2, 1) so that a1 > a2 > 0"});
    if (!(p.delta >= 0.0)) out.push_back({true, "delta must be >= 0"});
    if (!(p.alpha > 0.0)) out.push_back({true, "alpha must be > 0"});
    // beta = 0 is the uniform measure; several closed-form checks use it.
    if (!(p.beta >= 0.0)) out.push_back({true, "beta must be >= 0"});
    if (p.alpha > 0.0 && p.alpha <= 2.0 / kLog2)
        out.push_back({false, "alpha at or below 2/log 2: perturbation scale "
                              "not known to decorrelate the second block"});
    return out;
}

bool params_ok(const model_params& p) {
    for (const auto& issue : validate(p))
        if (issue.fatal) return false;
    return true;
}

double overlap(const configuration& s, const configuration& t, const model_params& p) {
    const bool b1 = s.i1 == t.i1, b2 = s.i2 == t.i2;
    if (b1 && b2) return 1.0;
    if (b1) return p.a1;
    if (b2) return p.a2();
    return 0.0;
}

double block_centering(int N, double a_eff) {
    const double s = std::sqrt(a_eff * kLog2);
    return N * s - a_eff / (2.0 * s) *
        std::log(2.0 * M_PI * a_eff * static_cast<double>(N));
}

centering_values centering(const model_params& p) {
    centering_values c;
    c.aN1 = block_centering(p.N, p.a1);
    const double aN2_0 = block_centering(p.N, p.a2());
    c.aN2_delta = block_centering(p.N, p.a2() * (1.0 + p.delta_n()));
    c.aN = c.aN1 + c.aN2_delta;
    c.delta_aN2 = c.aN2_delta - aN2_0;
    return c;
}

double centering_trend(const model_params& p, int n) {
    const double dn = p.delta * omega_schedule(n, p.alpha);
    const double d = block_centering(n, p.a2() * (1.0 + dn)) -
                     block_centering(n, p.a2());
    return d / (p.a2() * n * dn);
}

double analytic_free_energy(double beta, const model_params& p) {
    auto g = [beta](double a) {
        const double bc = std::sqrt(kLog2 / a);
        if (beta <= bc) return kLog2 / 2.0 + beta * beta * a / 2.0;
        return beta * std::sqrt(a * kLog2);
    };
    return g(p.a1) + g(p.a2());
}

disorder::disorder(const model_params& params, uint64_t master_seed, uint64_t seed_idx)
    : p(params), seed_index(seed_idx) {
    f1 = rng_stream::for_seed(master_seed, seed_idx, field::block1);
    f2 = rng_stream::for_seed(master_seed, seed_idx, field::block2);
    fd = rng_stream::for_seed(master_seed, seed_idx, field::onsite);
    const double n = static_cast<double>(p.N);
    s1 = std::sqrt(n * p.a1);
    s2 = std::sqrt(n * p.a2());
    const double vd = n * p.a2() * p.delta * p.omega();
    sd = vd > 0.0 ? std::sqrt(vd) : 0.0;
}

} // namespace remlab
