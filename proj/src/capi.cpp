#include "remlab/remlab.h"

#include <new>
#include <string>

#include "remlab/harness.hpp"

struct remlab_run {
    remlab::run_result result;
    std::string jsonl, csv, summary, digest;
};

namespace {

thread_local std::string g_last_error;

int finish(remlab::run_result&& res, const std::string& digest, remlab_run** out) {
    if (!out) {
        g_last_error = "null output handle";
        return REMLAB_ERR_CONFIG;
    }
    auto* run = new (std::nothrow) remlab_run;
    if (!run) {
        g_last_error = "allocation failure";
        *out = nullptr;
        return REMLAB_ERR_INTERNAL;
    }
    run->result = std::move(res);
    run->jsonl = run->result.records_jsonl();
    run->csv = run->result.records_csv();
    run->summary = run->result.summary.dump();
    run->digest = digest;
    *out = run;
    g_last_error = run->result.error;
    return run->result.status;
}

} // namespace

extern "C" {

const char* remlab_version(void) { return remlab::version_string(); }

int remlab_run_text(const char* config_text, remlab_run** out) {
    if (out) *out = nullptr;
    if (!config_text) {
        g_last_error = "null config text";
        return REMLAB_ERR_CONFIG;
    }
    try {
        std::string err;
        remlab::config cfg = remlab::config::parse(config_text, &err);
        if (!err.empty()) {
            g_last_error = err;
            return REMLAB_ERR_CONFIG;
        }
        return finish(remlab::run_experiment(cfg), cfg.digest_hex(), out);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return REMLAB_ERR_INTERNAL;
    }
}

int remlab_run_file(const char* path, remlab_run** out) {
    if (out) *out = nullptr;
    if (!path) {
        g_last_error = "null config path";
        return REMLAB_ERR_CONFIG;
    }
    try {
        std::string err;
        remlab::config cfg = remlab::config::parse_file(path, &err);
        if (!err.empty()) {
            g_last_error = err;
            return REMLAB_ERR_CONFIG;
        }
        return finish(remlab::run_experiment(cfg), cfg.digest_hex(), out);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return REMLAB_ERR_INTERNAL;
    }
}

int remlab_run_status(const remlab_run* run) {
    return run ? run->result.status : REMLAB_ERR_CONFIG;
}

const char* remlab_run_records_jsonl(const remlab_run* run) {
    return run ? run->jsonl.c_str() : "";
}

const char* remlab_run_records_csv(const remlab_run* run) {
    return run ? run->csv.c_str() : "";
}

const char* remlab_run_summary_json(const remlab_run* run) {
    return run ? run->summary.c_str() : "";
}

const char* remlab_run_digest(const remlab_run* run) {
    return run ? run->digest.c_str() : "";
}

void remlab_run_destroy(remlab_run* run) { delete run; }

const char* remlab_last_error(void) { return g_last_error.c_str(); }

} // extern "C"
