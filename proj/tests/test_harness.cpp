#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "remlab/harness.hpp"

#include "remlab/gibbs.hpp"
#include "remlab/model.hpp"

#include <cmath>
#include <string>

using namespace remlab;

namespace {

const char* kSample =
    "# comment line\n"
    "[model]\n"
    "N = 8\n"
    "beta = 2.0   ; trailing comment\n"
    "\n"
    "[run]\n"
    "kind = overlaps\n"
    "seeds = 12\n"
    "run.master_seed = 5\n";

} // namespace

TEST_CASE("config parsing, sections and comments") {
    std::string err;
    config c = config::parse(kSample, &err);
    CHECK(err.empty());
    CHECK(c.get_int("model.N", 0) == 8);
    CHECK(c.get_double("model.beta", 0.0) == 2.0);
    CHECK(c.get_str("run.kind", "") == "overlaps");
    CHECK(c.get_int("run.seeds", 0) == 12);
    // dotted key inside a section is taken verbatim
    CHECK(c.get_int("run.master_seed", 0) == 5);
    CHECK(c.get_int("missing.key", 42) == 42);
    CHECK(c.has("model.N"));
    CHECK(!c.has("model.n"));
}

TEST_CASE("config parse errors") {
    std::string err;
    config::parse("key value\n", &err);
    CHECK(!err.empty());
    config::parse("[oops\n", &err);
    CHECK(!err.empty());
    config::parse("= 3\n", &err);
    CHECK(!err.empty());
    config::parse("a.b = 1\n", &err);
    CHECK(err.empty());
}

TEST_CASE("canonical emission round trips and digests are stable") {
    std::string err;
    config c = config::parse(kSample, &err);
    config back = config::parse(c.emit(), &err);
    CHECK(err.empty());
    CHECK(back.kv == c.kv);
    CHECK(back.digest() == c.digest());
    CHECK(c.digest_hex().size() == 16);

    config other = c;
    other.set("model.N", "10");
    CHECK(other.digest() != c.digest());

    // key order in the source does not matter
    config swapped = config::parse("b = 2\na = 1\n", &err);
    config sorted = config::parse("a = 1\nb = 2\n", &err);
    CHECK(swapped.digest() == sorted.digest());
}

TEST_CASE("typed getters reject malformed values") {
    std::string err;
    config c = config::parse("x = 3.5\ni = 7\nb = yes\nbad = 1.2.3\n", &err);
    CHECK(c.get_double("x", 0.0) == 3.5);
    CHECK(c.get_int("i", 0) == 7);
    CHECK(c.get_bool("b", false));
    CHECK(c.get_bool("nope", true));
    CHECK_THROWS_AS(c.get_int("x", 0), const remlab_error&);
    CHECK_THROWS_AS(c.get_double("bad", 0.0), const remlab_error&);
    CHECK_THROWS_AS(c.get_bool("i", false), const remlab_error&);
    config b = config::parse("b = maybe\n", &err);
    CHECK_THROWS_AS(b.get_bool("b", false), const remlab_error&);
}

TEST_CASE("runs are bit stable across repeats") {
    std::string err;
    config c = config::parse(kSample, &err);
    run_result a = run_experiment(c);
    run_result b = run_experiment(c);
    REQUIRE(a.status == 0);
    CHECK(a.records_jsonl() == b.records_jsonl());
    CHECK(a.summary["digest"] == b.summary["digest"]);
    CHECK(a.summary["n_records"] == b.summary["n_records"]);
}

TEST_CASE("worker count does not move the estimates") {
    std::string base =
        "model.N = 8\nrun.kind = overlaps\nrun.seeds = 32\nrun.master_seed = 3\n";
    std::string err;
    config c1 = config::parse(base + "run.workers = 1\n", &err);
    config c8 = config::parse(base + "run.workers = 8\n", &err);
    run_result r1 = run_experiment(c1);
    run_result r8 = run_experiment(c8);
    REQUIRE(r1.status == 0);
    REQUIRE(r8.status == 0);
    REQUIRE(r1.records.size() == r8.records.size());
    for (size_t i = 0; i < r1.records.size(); ++i) {
        const double m1 = r1.records[i]["mean"].get<double>();
        const double m8 = r8.records[i]["mean"].get<double>();
        CHECK(std::abs(m1 - m8) <= 1e-10);
        CHECK(m1 >= 0.0);
        CHECK(m1 <= 1.0);
    }
}

TEST_CASE("overlap records carry limit references only in the frozen phase") {
    std::string err;
    config cold = config::parse(
        "model.N = 8\nmodel.beta = 2\nrun.kind = overlaps\nrun.seeds = 4\n", &err);
    run_result rc = run_experiment(cold);
    REQUIRE(rc.status == 0);
    REQUIRE(rc.records.size() == 4);
    for (const auto& r : rc.records) CHECK(r.contains("limit"));
    CHECK(rc.records[0]["bin"] == "0");
    CHECK(rc.records[3]["bin"] == "1");

    config warm = config::parse(
        "model.N = 8\nmodel.beta = 1\nrun.kind = overlaps\nrun.seeds = 4\n", &err);
    run_result rw = run_experiment(warm);
    REQUIRE(rw.status == 0);
    for (const auto& r : rw.records) CHECK(!r.contains("limit"));
}

TEST_CASE("free energy record carries the analytic limit") {
    std::string err;
    config c = config::parse(
        "model.N = 8\nrun.kind = free-energy\nrun.seeds = 10\n", &err);
    run_result r = run_experiment(c);
    REQUIRE(r.status == 0);
    REQUIRE(r.records.size() == 1);
    model_params p;
    p.N = 8;
    CHECK(r.records[0]["analytic_limit"].get<double>() ==
          doctest::Approx(analytic_free_energy(2.0, p)).epsilon(1e-14));
    CHECK(r.records[0]["mean"].get<double>() > 0.5);
}

TEST_CASE("failure statuses") {
    std::string err;
    config unknown = config::parse("run.kind = frobnicate\nmodel.N = 8\n", &err);
    run_result ru = run_experiment(unknown);
    CHECK(ru.status == 2);
    CHECK(!ru.error.empty());
    CHECK(ru.summary["status"] == 2);

    config badn = config::parse("run.kind = overlaps\nmodel.N = 7\n", &err);
    CHECK(run_experiment(badn).status == 2);

    config missing = config::parse("model.N = 8\n", &err);
    CHECK(run_experiment(missing).status == 2);

    // N = 28 passes model validation but exceeds the full-table cap
    config huge = config::parse(
        "run.kind = overlaps\nmodel.N = 28\nrun.seeds = 1\nrun.perturbed = true\n",
        &err);
    CHECK(run_experiment(huge).status == 3);

    config badw = config::parse(
        "run.kind = overlaps\nmodel.N = 8\nrun.workers = 0\n", &err);
    CHECK(run_experiment(badw).status == 2);
}

TEST_CASE("extremes and forbidden kinds dispatch") {
    std::string err;
    config bm = config::parse(
        "model.N = 12\nrun.kind = extremes\nextremes.mode = blockmax\n"
        "extremes.block = 1\nextremes.center = quantile\nrun.seeds = 80\n",
        &err);
    run_result r = run_experiment(bm);
    REQUIRE(r.status == 0);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0]["ks"].get<double>() >= 0.0);
    CHECK(r.records[0]["ks"].get<double>() <= 1.0);

    config bad = config::parse(
        "model.N = 12\nrun.kind = extremes\nextremes.mode = nope\n", &err);
    CHECK(run_experiment(bad).status == 2);

    config fb = config::parse(
        "model.N = 10\nrun.kind = forbidden-pairs\nrun.seeds = 6\n"
        "forbidden.lo = 0\nforbidden.hi = 1\nforbidden.alphas = 3, 4\n",
        &err);
    run_result rf = run_experiment(fb);
    REQUIRE(rf.status == 0);
    REQUIRE(rf.records.size() == 2);
    CHECK(rf.records[0]["alpha"].get<double>() == 3.0);
    CHECK(rf.records[1]["alpha"].get<double>() == 4.0);

    config tk = config::parse(
        "model.N = 8\nrun.kind = extremes\nextremes.mode = topk\n"
        "extremes.k = 5\nrun.seeds = 2\n",
        &err);
    run_result rt = run_experiment(tk);
    REQUIRE(rt.status == 0);
    REQUIRE(rt.records.size() == 2);
    CHECK(rt.records[0]["values"].size() == 5);
}

TEST_CASE("record serialization") {
    run_result r;
    r.records.push_back({{"a", "x,y"}, {"b", 1}});
    r.records.push_back({{"b", 2}});
    const std::string csv = r.records_csv();
    CHECK(csv == "a,b\n\"x,y\",1\n,2\n");

    const std::string jsonl = r.records_jsonl();
    CHECK(jsonl.find('\n') != std::string::npos);
    // each line parses back to the original record
    size_t start = 0;
    int line = 0;
    while (start < jsonl.size()) {
        const size_t end = jsonl.find('\n', start);
        nlohmann::json parsed = nlohmann::json::parse(jsonl.substr(start, end - start));
        CHECK(parsed == r.records[line]);
        start = end + 1;
        ++line;
    }
    CHECK(line == 2);
}

TEST_CASE("version") {
    CHECK(std::string(version_string()) == "1.0.0");
}
