#pragma once

namespace seqsgpv {

inline constexpr const char* kToolVersion = "0.1.0";
/// Bumped whenever a CSV column layout changes.
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace seqsgpv
