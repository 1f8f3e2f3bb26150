#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace aclab {

inline constexpr const char* kCodeVersion = "anticoncentration-lab 0.1.0";

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    int workers = 0;            // 0: ACLAB_WORKERS env or hardware count
    std::string output_dir = ".";
    nlohmann::json params;

    std::string canonical_json() const;  // digest input: sorted keys, no timestamps
    std::string digest() const;
};

struct ConfigDiagnostics {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
    std::string joined() const;
};

// Full schema check without executing anything. Unknown fields are rejected;
// seeds are mandatory; capacity bounds are enforced here so a bad config
// fails before any computation.
ConfigDiagnostics validate_config_json(const nlohmann::json& j);

// Parses and validates; throws config_error carrying the diagnostics.
ExperimentConfig load_config_file(const std::string& path);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uint64_t bytes;
};

struct RunManifest {
    std::string experiment;
    std::string config_digest;
    std::string code_version;
    std::string started_at;
    std::string finished_at;
    std::vector<ManifestEntry> outputs;

    nlohmann::json to_json() const;
};

// Executes the named pipeline, writes the experiment artifacts plus
// manifest.json into the output directory.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace aclab
