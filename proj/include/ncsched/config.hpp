#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ncsched/engine.hpp"

namespace ncsched {

/// Schema violation, tagged with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunSpec {
    SimConfig sim;
    std::string out_dir = "out";
    int threads = 1;

    bool operator==(const RunSpec&) const = default;
};

/// Validates a config document and fills defaults. Unknown keys are errors.
///
/// Accepted shape (every field optional except n_users and an erasure spec):
///
///     { "n_users": 3, "lambda": 0.7, "slots": 200000, "seed": 0,
///       "deadline": null, "warmup_fraction": 0.5, "move_insertion": "tail",
///       "schedule_cap": 8, "out_dir": "out", "threads": 1,
///       "channel": { "mode": "fixed", "eps": [0.2, 0.2, 0.2] },
///       "scheduler": { "kind": "lys", "dv_mode": "full", "eps_view": "current" } }
///
/// Shorthands: a top-level "eps" array stands for channel.eps, and
/// "scheduler" may be given as just the kind string.
RunSpec parse_config(const nlohmann::json& doc);
RunSpec parse_config_text(const std::string& text);

/// Effective configuration with every default spelled out. Re-parses to an
/// identical RunSpec.
nlohmann::json to_json(const RunSpec& spec);

/// Rewrites the top-level "eps" and string "scheduler" shorthands into
/// their canonical nested form.
nlohmann::json expand_shorthands(const nlohmann::json& doc);

/// Recursively overlays `patch` onto `doc` (objects merge, everything else replaces).
void merge_overrides(nlohmann::json& doc, const nlohmann::json& patch);

}  // namespace ncsched
