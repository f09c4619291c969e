#pragma once
// Experiment harness: flat key=value configs with canonical emission and a
// stable digest, experiment dispatch, and record serialization.
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace remlab {

struct config {
    std::map<std::string, std::string> kv;

    // INI-style text: [section] headers prefix keys as "section.key";
    // dotted keys are accepted directly. '#' and ';' start comments.
    static config parse(const std::string& text, std::string* err = nullptr);
    static config parse_file(const std::string& path, std::string* err = nullptr);

    // Canonical form: sorted "key = value" lines. parse(emit()) == *this.
    std::string emit() const;
    uint64_t digest() const;       // FNV-1a 64 over emit()
    std::string digest_hex() const;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get_str(const std::string& key, const std::string& dflt) const;
    int64_t get_int(const std::string& key, int64_t dflt) const;
    double get_double(const std::string& key, double dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    void set(const std::string& key, const std::string& value) { kv[key] = value; }
};

struct run_result {
    int status = 0;  // 0 ok, 2 config error, 3 resource cap, 4 internal
    std::string error;
    nlohmann::json summary;
    std::vector<nlohmann::json> records;

    std::string records_jsonl() const;
    std::string records_csv() const;
};

// Runs the experiment named by run.kind. Never throws; failures land in
// status/error.
run_result run_experiment(const config& cfg);

const char* version_string();

} // namespace remlab
