#pragma once
// Extended Ghirlanda-Guerra machinery: overlap observables, replica sources
// backed by the Gibbs measure or the cascade, the (s+1)-replica residual
// estimator, p-power Gaussian fields, and the Gaussian
// integration-by-parts identity check.
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "remlab/cascade.hpp"
#include "remlab/estimate.hpp"
#include "remlab/gibbs.hpp"
#include "remlab/model.hpp"

namespace remlab {

// Observables over pairwise overlaps of replicas 1..s. Text forms:
//   "mono:"                  constant 1
//   "mono:k12=1,k13=2"       q_{12}^1 * q_{13}^2   (total power <= 4)
//   "ind:q12=a1"             indicator of q_{12} = a1 (values: 0, a2, a1, 1)
struct observable {
    enum class kind { monomial, indicator };
    struct term {
        int i = 1, j = 2, power = 1;
    };
    kind k = kind::monomial;
    std::vector<term> terms;
    int qi = 1, qj = 2;
    std::string ind_value = "0";

    static observable parse(const std::string& text);
    int max_replica() const;
    int total_power() const;
    double indicator_level(const model_params& p) const;
    // q is a row-major s x s overlap matrix.
    double eval(const model_params& p, const double* q, int s) const;
    // For the single-pair factor g: evaluate at one overlap value.
    double eval_scalar(const model_params& p, double qv) const;
};

// One realization of a random overlap structure plus replica draws from it.
struct replica_source {
    virtual ~replica_source() = default;
    virtual void start_realization(uint64_t index) = 0;
    // One fresh tuple of `count` replicas; fills the count x count overlaps.
    virtual void fill_overlaps(int count, double* q) = 0;
};

struct gibbs_replica_source : replica_source {
    model_params p;
    uint64_t master_seed;
    bool perturbed;
    bool use_product = false;
    product_gibbs pg;
    gibbs_table gt;
    rng_seq rs;
    std::vector<configuration> cfg;

    gibbs_replica_source(const model_params& params, uint64_t master, bool pert);
    void start_realization(uint64_t index) override;
    void fill_overlaps(int count, double* q) override;
};

struct cascade_replica_source : replica_source {
    model_params p;
    double eps;
    uint64_t master_seed;
    cascade_realization real;
    std::unique_ptr<cascade_sampler> smp;
    rng_seq rs;
    std::vector<cascade_replica> rep;

    cascade_replica_source(const model_params& params, double eps_val,
                           uint64_t master);
    void start_realization(uint64_t index) override;
    void fill_overlaps(int count, double* q) override;
};

// Residual of the extended identity for the pair (f, g):
//   E<f g(q_{1,s+1})> - (1/s) E<f> E<g(q_{12})> - (1/s) sum_{l=2}^s E<f g(q_{1l})>
// The product term is estimated split-half across realizations (symmetrized)
// to avoid same-realization bias; the error bar comes from independent
// realization blocks.
struct eggi_options {
    int s = 2;
    int n_realizations = 2000;
    int n_inner = 200;
    int n_blocks = 20;
};
struct eggi_result {
    estimate residual;
    double term_new = 0.0, term_prod = 0.0, term_sum = 0.0;
};
eggi_result eggi_residual(replica_source& src, const model_params& p,
                          const observable& f, const observable& g,
                          const eggi_options& opt);

// Gaussian field with covariance N q^p: u Y1_{i1} + v Y2_{i2} + w Y12_sigma,
// u^2 = N a1^p, v^2 = N a2^p, w^2 = N (1 - a1^p - a2^p).
struct p_field {
    model_params prm;
    int power = 2;
    double u = 0.0, v = 0.0, w = 0.0;
    rng_stream f1, f2, f12;

    p_field(const model_params& p, int pw, uint64_t master_seed,
            uint64_t seed_index);
    double value(uint64_t flat) const {
        const uint64_t i1 = flat >> (prm.N / 2);
        const uint64_t i2 = flat & (prm.half_count() - 1);
        return u * f1.gaussian(i1) + v * f2.gaussian(i2) + w * f12.gaussian(flat);
    }
};

// Integration-by-parts identity for the Hamiltonian term
// P = sqrt(delta_n) b_p Y^p added to beta_base X:
//   E<P f> / (delta_n N) = b_p^2 ( sum_{l<=s} E<q_{1l}^p f> - s E<q_{1,s+1}^p f> )
// Inner brackets are contracted exactly; the outer average runs over seeds.
// f is q_{12}^{f_power} (f_power = 0 means f == 1; s <= 2).
// With delta_n = 0 the left side uses the raw field Y^p and averages to 0.
struct ibp_result {
    estimate lhs, rhs, diff;
    double delta_n = 0.0, b_p = 1.0, beta_base = 0.0;
    int p_power = 2, s = 1, f_power = 0;
};
ibp_result ibp_check(const model_params& prm, int p_power, int s, int f_power,
                     double delta_n, double b_p, double beta_base, int n_seeds,
                     uint64_t master_seed, int workers = 1,
                     bool uniform_hook = false);

inline double default_ibp_delta(const model_params& p) {
    return std::pow(static_cast<double>(p.N), -1.0 / 16.0);
}

} // namespace remlab
