#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqsgpv/oc.hpp"

namespace seqsgpv {

/// Everything a batch run needs, validated.
struct RunSpec {
    OCConfig oc;
    /// Source of the bootstrap pool, as written in the config (or --pool).
    std::optional<std::filesystem::path> pool_path;
    FrequencyGrid trajectory;
    std::vector<int> reversal_lags;
    std::vector<int> calibrate_waits;
    double alpha_target = 0.05;
    FrequencyGrid sweep;
    std::optional<double> sweep_reference_theta;

    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Parses and validates a JSON run configuration. Relative pool paths are
/// resolved against `base_dir`. Throws ConfigError listing every problem
/// (unknown keys, missing keys, type errors, invariant violations), or
/// DataError when the referenced pool is unusable.
RunSpec parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {});
RunSpec parse_config(const std::filesystem::path& path);

/// Effective configuration with every default spelled out. Parsing the
/// result yields an equal RunSpec.
nlohmann::json to_json(const RunSpec& spec);

struct OutcomePool {
    std::vector<double> values;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Reads one finite number per line. A non-numeric first line is treated as
/// a header; blank lines are skipped. Throws DataError naming the line.
OutcomePool ingest_pool(const std::filesystem::path& path);

/// Replaces the outcome model with a bootstrap pool read from `path` and
/// returns the pool with its summary statistics.
OutcomePool use_pool(RunSpec& spec, const std::filesystem::path& path);

}  // namespace seqsgpv
