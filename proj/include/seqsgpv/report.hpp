#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqsgpv/calibrate.hpp"
#include "seqsgpv/config.hpp"
#include "seqsgpv/oc.hpp"

namespace seqsgpv {

/// Shortest round-trip representation; NaN is written as NA.
std::string format_double(double x);

/// Creates `dir` if needed and checks that a file can be written there.
/// Throws OutputError.
void ensure_writable(const std::filesystem::path& dir);

// Column layouts (schema version kCsvSchemaVersion):
//   simulate:   design,theta,replicates,<rate>,<rate>_se,...,sd_n,not_estimable
//   trajectory: design,W,S,A,N,type1_error,mc_se,avg_n
//   reversals:  design,W,S,A,N,L,reject_to_accept,...,avg_n_enrolled
//   calibrate:  design,alpha_target,S,A,N,W,type1_error,mc_se,...,selected
//   sweep:      design,W,S,A,N,reference_theta,type1_error,mc_se,power,...
void write_simulate_csv(std::ostream& out, const OCSummary& summary);
void write_trajectory_csv(std::ostream& out, std::string_view design,
                          const std::vector<TrajectoryPoint>& points);
void write_reversals_csv(std::ostream& out, std::string_view design, const MonitoringPlan& plan,
                         const std::vector<ReversalRow>& rows);
void write_calibrate_csv(std::ostream& out, std::string_view design,
                         const CalibrationReport& report);
void write_sweep_csv(std::ostream& out, std::string_view design, double reference_theta,
                     const std::vector<SweepRow>& rows);

/// FNV-1a over the canonical dump of the effective configuration.
std::uint64_t config_hash(const nlohmann::json& effective);

/// Sidecar contents: enough to reconstruct the run.
nlohmann::json run_metadata(const RunSpec& spec, std::string_view subcommand, int workers);

/// Writes `text` to `path` via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace seqsgpv
