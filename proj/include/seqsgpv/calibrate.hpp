#pragma once

#include <optional>
#include <span>
#include <vector>

#include "seqsgpv/oc.hpp"

namespace seqsgpv {

struct CalibrationCell {
    int wait = 0;
    Estimate type1_error;
    double upper_2se = 0.0;  ///< estimate + 2 SE, for conservative choices
    double avg_n = 0.0;      ///< average observed outcomes under theta = 0
    bool qualifies = false;  ///< point estimate <= target
    /// Estimate rose above the previous cell by more than 3 combined SEs.
    bool nonmonotone = false;
};

struct CalibrationReport {
    double alpha_target = 0.0;
    int step = 0;
    int affirm = 0;
    int max_n = 0;  ///< cap used (the ceiling when the plan is unrestricted)
    std::vector<CalibrationCell> cells;
    std::optional<std::size_t> selected;  ///< index into cells

    bool attainable() const noexcept { return selected.has_value(); }
};

/// Smallest wait time in `wait_grid` whose estimated Type I error at the
/// plan's cap is <= alpha_target. S, A and N come from cfg.plan; cfg.effects
/// must contain 0. Every grid cell is evaluated and reported.
CalibrationReport find_min_wait(const OCConfig& cfg, std::span<const int> wait_grid,
                                double alpha_target);

struct SweepRow {
    int wait = 0;
    int step = 0;
    int affirm = 0;
    int max_n = 0;
    bool valid = false;
    Estimate type1_error;
    Estimate power;
    double avg_n_null = 0.0;
    double avg_n_reference = 0.0;
};

/// Type I error, power at `reference_theta` and average sample size over the
/// cross product of the grids. Every cell reuses the same replicate streams.
/// cfg.effects must contain both 0 and reference_theta.
std::vector<SweepRow> sweep_frequencies(const OCConfig& cfg, const FrequencyGrid& grid,
                                        double reference_theta);

}  // namespace seqsgpv
