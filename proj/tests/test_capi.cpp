#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "remlab/remlab.h"

#include <cstring>
#include <string>

namespace {

const char* kGood =
    "model.N = 8\n"
    "model.beta = 2\n"
    "run.kind = overlaps\n"
    "run.seeds = 6\n";

} // namespace

TEST_CASE("version string") {
    CHECK(std::string(remlab_version()) == "1.0.0");
}

TEST_CASE("successful run through the shared library") {
    remlab_run* run = nullptr;
    int rc = remlab_run_text(kGood, &run);
    REQUIRE(rc == REMLAB_OK);
    REQUIRE(run != nullptr);
    CHECK(remlab_run_status(run) == REMLAB_OK);

    const char* jsonl = remlab_run_records_jsonl(run);
    REQUIRE(jsonl != nullptr);
    CHECK(std::strlen(jsonl) > 0);
    CHECK(std::strchr(jsonl, '\n') != nullptr);

    const char* csv = remlab_run_records_csv(run);
    REQUIRE(csv != nullptr);
    CHECK(std::strstr(csv, "mean") != nullptr);

    const char* digest = remlab_run_digest(run);
    REQUIRE(digest != nullptr);
    CHECK(std::strlen(digest) == 16);

    const char* summary = remlab_run_summary_json(run);
    REQUIRE(summary != nullptr);
    std::string s(summary);
    CHECK(s.find("\"status\":0") != std::string::npos);
    CHECK(s.find(digest) != std::string::npos);
    CHECK(s.find("\"kind\":\"overlaps\"") != std::string::npos);

    // repeated calls return the cached pointer
    CHECK(remlab_run_records_jsonl(run) == jsonl);
    remlab_run_destroy(run);
}

TEST_CASE("experiment failure returns a handle with status") {
    remlab_run* run = nullptr;
    int rc = remlab_run_text("model.N = 7\nrun.kind = overlaps\n", &run);
    CHECK(rc == REMLAB_ERR_CONFIG);
    REQUIRE(run != nullptr);
    CHECK(remlab_run_status(run) == REMLAB_ERR_CONFIG);
    const char* err = remlab_last_error();
    REQUIRE(err != nullptr);
    CHECK(std::strlen(err) > 0);
    CHECK(std::string(remlab_run_records_jsonl(run)).empty());
    remlab_run_destroy(run);
}

TEST_CASE("config text that does not parse yields no handle") {
    remlab_run* run = nullptr;
    int rc = remlab_run_text("key value without equals\n", &run);
    CHECK(rc == REMLAB_ERR_CONFIG);
    CHECK(run == nullptr);
    CHECK(std::strlen(remlab_last_error()) > 0);
}

TEST_CASE("null arguments are rejected") {
    remlab_run* run = nullptr;
    CHECK(remlab_run_text(nullptr, &run) == REMLAB_ERR_CONFIG);
    CHECK(run == nullptr);
    CHECK(remlab_run_text(kGood, nullptr) == REMLAB_ERR_CONFIG);

    CHECK(remlab_run_status(nullptr) == REMLAB_ERR_CONFIG);
    CHECK(std::string(remlab_run_records_jsonl(nullptr)).empty());
    CHECK(std::string(remlab_run_records_csv(nullptr)).empty());
    CHECK(std::string(remlab_run_summary_json(nullptr)).empty());
    CHECK(std::string(remlab_run_digest(nullptr)).empty());
    remlab_run_destroy(nullptr);
}

TEST_CASE("file entry point") {
    const char* path = "capi_test_config.ini";
    {
        FILE* f = fopen(path, "w");
        REQUIRE(f != nullptr);
        fputs(kGood, f);
        fclose(f);
    }
    remlab_run* run = nullptr;
    CHECK(remlab_run_file(path, &run) == REMLAB_OK);
    REQUIRE(run != nullptr);
    CHECK(remlab_run_status(run) == REMLAB_OK);
    remlab_run_destroy(run);
    remove(path);

    remlab_run* missing = nullptr;
    CHECK(remlab_run_file("no_such_file_here.ini", &missing) == REMLAB_ERR_CONFIG);
    CHECK(missing == nullptr);
}
