#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "remlab/model.hpp"

#include <cmath>
#include <set>

using namespace remlab;

TEST_CASE("inverse temperatures and exponents at default couplings") {
    model_params p;
    CHECK(p.a2() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.beta1() == doctest::Approx(1.0748233812739851).epsilon(1e-15));
    CHECK(p.beta2() == doctest::Approx(1.3163844238670797).epsilon(1e-15));
    CHECK(p.x1() == doctest::Approx(0.5374116906369926).epsilon(1e-15));
    CHECK(p.x2() == doctest::Approx(0.6581922119335398).epsilon(1e-15));
    CHECK(p.half_count() == 1024);
    CHECK(p.config_count() == 1048576);
}

TEST_CASE("perturbation variance schedule") {
    CHECK(omega_schedule(20, 4.0) == doctest::Approx(0.5991464547107982).epsilon(1e-15));
    CHECK(omega_schedule(100, 4.0) == doctest::Approx(4.0 * std::log(100.0) / 100.0).epsilon(1e-15));
    model_params p;
    CHECK(p.omega() == doctest::Approx(0.5991464547107982).epsilon(1e-15));
    CHECK(p.delta_n() == doctest::Approx(0.5991464547107982).epsilon(1e-15));
    p.delta = 0.5;
    CHECK(p.delta_n() == doctest::Approx(0.5 * 0.5991464547107982).epsilon(1e-15));
}

TEST_CASE("configuration flat index round trip") {
    const int N = 8;
    const uint64_t half = 1ull << (N / 2);
    std::set<uint64_t> seen;
    for (uint64_t i1 = 0; i1 < half; ++i1)
        for (uint64_t i2 = 0; i2 < half; ++i2) {
            configuration c{i1, i2};
            uint64_t f = c.flat(N);
            seen.insert(f);
            configuration back = configuration::from_flat(f, N);
            CHECK(back.i1 == i1);
            CHECK(back.i2 == i2);
        }
    CHECK(seen.size() == half * half);
    CHECK(*seen.rbegin() == half * half - 1);
}

TEST_CASE("overlap takes four values and maps to stable bins") {
    model_params p;
    configuration a{3, 7};
    CHECK(overlap(a, a, p) == doctest::Approx(1.0));
    CHECK(overlap(a, configuration{3, 9}, p) == doctest::Approx(p.a1));
    CHECK(overlap(a, configuration{5, 7}, p) == doctest::Approx(p.a2()));
    CHECK(overlap(a, configuration{5, 9}, p) == doctest::Approx(0.0));
    CHECK(overlap_bin(a, configuration{5, 9}) == 0);
    CHECK(overlap_bin(a, configuration{5, 7}) == 1);
    CHECK(overlap_bin(a, configuration{3, 9}) == 2);
    CHECK(overlap_bin(a, a) == 3);
    CHECK(distance_from_overlap(1.0) == doctest::Approx(0.0));
    CHECK(distance_from_overlap(0.0) == doctest::Approx(1.0));
    CHECK(distance_from_overlap(p.a1) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-15));
}

TEST_CASE("the overlap geometry is not ultrametric") {
    // sigma and tau share block 1, tau and rho share block 2, sigma and rho
    // share nothing: d(sigma,rho) = 1 exceeds both other distances.
    model_params p;
    configuration s{1, 1}, t{1, 2}, r{3, 2};
    double dst = distance_from_overlap(overlap(s, t, p));
    double dtr = distance_from_overlap(overlap(t, r, p));
    double dsr = distance_from_overlap(overlap(s, r, p));
    CHECK(dsr == doctest::Approx(1.0));
    CHECK(dsr > std::max(dst, dtr) + 0.05);
}

TEST_CASE("block centering values") {
    CHECK(block_centering(20, 0.6) == doctest::Approx(10.886953109663859).epsilon(1e-14));
    CHECK(block_centering(20, 0.4) == doctest::Approx(9.043167095660147).epsilon(1e-14));
    model_params p;
    centering_values c = centering(p);
    CHECK(c.aN1 == doctest::Approx(10.886953109663859).epsilon(1e-14));
    CHECK(c.aN == doctest::Approx(c.aN1 + c.aN2_delta).epsilon(1e-15));
    double a2d = p.a2() * (1.0 + p.delta_n());
    CHECK(c.aN2_delta == doctest::Approx(block_centering(p.N, a2d)).epsilon(1e-14));
    CHECK(c.delta_aN2 == doctest::Approx(c.aN2_delta - block_centering(p.N, p.a2())).epsilon(1e-12));
    CHECK(c.delta_aN2 > 0.0);
}

TEST_CASE("centering shift per unit perturbation variance tends to beta2/2") {
    model_params p;
    double lim = p.beta2() / 2.0;
    double t20 = centering_trend(p, 20);
    double t1k = centering_trend(p, 1000);
    double t1m = centering_trend(p, 1000000);
    CHECK(t20 == doctest::Approx(0.45211969360599447).epsilon(1e-12));
    CHECK(std::abs(t1k - lim) < std::abs(t20 - lim));
    CHECK(std::abs(t1m - lim) < std::abs(t1k - lim));
    CHECK(t1m == doctest::Approx(lim).epsilon(3e-5));
}

TEST_CASE("analytic free energy") {
    model_params p;
    CHECK(analytic_free_energy(2.0, p) == doctest::Approx(2.342895596622446).epsilon(1e-15));
    CHECK(analytic_free_energy(0.0, p) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    // continuous across both freezing points
    for (double bc : {p.beta1(), p.beta2()}) {
        double lo = analytic_free_energy(bc - 1e-9, p);
        double hi = analytic_free_energy(bc + 1e-9, p);
        CHECK(std::abs(hi - lo) < 1e-8);
    }
    // monotone increasing on a grid
    double prev = analytic_free_energy(0.0, p);
    for (double b = 0.1; b < 4.05; b += 0.1) {
        double cur = analytic_free_energy(b, p);
        CHECK(cur >= prev - 1e-15);
        prev = cur;
    }
    // linear growth above beta2 with slope independent of beta
    double f3 = analytic_free_energy(3.0, p);
    double f4 = analytic_free_energy(4.0, p);
    double slope = std::sqrt(p.a1 * std::log(2.0)) + std::sqrt(p.a2() * std::log(2.0));
    CHECK(f4 - f3 == doctest::Approx(slope).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    model_params p;
    CHECK(params_ok(p));

    auto fatal_count = [](const model_params& q) {
        int n = 0;
        for (const auto& is : validate(q))
            if (is.fatal) ++n;
        return n;
    };

    model_params bad = p;
    bad.N = 7;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.N = 2;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.N = bad.n_cap + 2;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.a1 = 0.5;  // blocks must be asymmetric with a1 > a2
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.a1 = 1.0;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.delta = -0.25;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.beta = -1.0;
    CHECK(fatal_count(bad) > 0);
    bad = p;
    bad.beta = 0.0;  // uniform measure is allowed
    CHECK(fatal_count(bad) == 0);

    // alpha at or below 2/log 2 keeps the variance inflation too small for
    // the perturbation to act; flagged but not fatal.
    model_params warn = p;
    warn.alpha = 2.0;
    CHECK(fatal_count(warn) == 0);
    bool flagged = false;
    for (const auto& is : validate(warn))
        if (!is.fatal) flagged = true;
    CHECK(flagged);
    warn.alpha = 2.8853900817779268 + 1e-6;
    CHECK(validate(warn).empty());
}

TEST_CASE("disorder is deterministic and respects delta") {
    model_params p;
    p.N = 10;
    disorder d1(p, /*master=*/42, /*seed_idx=*/3);
    disorder d2(p, 42, 3);
    disorder d3(p, 42, 4);
    configuration c{11, 19};
    CHECK(d1.x1(c.i1) == d2.x1(c.i1));
    CHECK(d1.x2(c.i2) == d2.x2(c.i2));
    CHECK(d1.xdelta(c.i1, c.i2) == d2.xdelta(c.i1, c.i2));
    CHECK(d1.x1(c.i1) != d3.x1(c.i1));

    CHECK(d1.energy(c, false) == doctest::Approx(d1.x1(c.i1) + d1.x2(c.i2)).epsilon(1e-15));
    CHECK(d1.energy(c, true) ==
          doctest::Approx(d1.x1(c.i1) + d1.x2(c.i2) + d1.xdelta(c.i1, c.i2)).epsilon(1e-15));

    model_params p0 = p;
    p0.delta = 0.0;
    disorder d0(p0, 42, 3);
    CHECK(d0.xdelta(c.i1, c.i2) == 0.0);
    CHECK(d0.energy(c, true) == doctest::Approx(d0.energy(c, false)).epsilon(1e-15));

    // block fields have the advertised scale
    double var1 = 0.0, var2 = 0.0;
    const uint64_t m = p.half_count();
    for (uint64_t i = 0; i < m; ++i) {
        var1 += d1.x1(i) * d1.x1(i);
        var2 += d1.x2(i) * d1.x2(i);
    }
    var1 /= double(m);
    var2 /= double(m);
    CHECK(var1 == doctest::Approx(p.N * p.a1).epsilon(0.25));
    CHECK(var2 == doctest::Approx(p.N * p.a2()).epsilon(0.25));
}
