#include "seqsgpv/calibrate.hpp"

#include <cmath>
#include <string>

#include "seqsgpv/error.hpp"

namespace seqsgpv {

CalibrationReport find_min_wait(const OCConfig& cfg, std::span<const int> wait_grid,
                                double alpha_target) {
    if (wait_grid.empty()) {
        throw InvalidInput("wait grid must not be empty");
    }
    if (!(alpha_target > 0.0 && alpha_target <= 1.0)) {
        throw InvalidInput("alpha target must lie in (0, 1]");
    }
    for (int w : wait_grid) {
        if (w < 4) {
            throw InvalidInput("wait grid entry " + std::to_string(w) + " is below 4");
        }
    }
    cfg.validate();
    const std::size_t null_idx = effect_index(cfg, 0.0);

    CalibrationReport report;
    report.alpha_target = alpha_target;
    report.step = cfg.plan.step;
    report.affirm = cfg.plan.affirm;
    report.max_n = cfg.plan.max_n.value_or(cfg.ceiling);
    const int caps[] = {report.max_n};

    for (int w : wait_grid) {
        MonitoringPlan plan = cfg.plan;
        plan.wait = w;
        plan.max_n.reset();
        CalibrationCell cell;
        cell.wait = w;
        const CapPoint point = capped_rejection(cfg, null_idx, plan, caps).front();
        if (!point.valid) {
            throw InvalidInput("wait " + std::to_string(w) + " exceeds the cap " +
                               std::to_string(report.max_n));
        }
        cell.type1_error = point.reject_rate;
        cell.avg_n = point.avg_n;
        const double se = cell.type1_error.se_defined() ? cell.type1_error.se : 0.0;
        cell.upper_2se = cell.type1_error.value + 2.0 * se;
        cell.qualifies = cell.type1_error.value <= alpha_target;
        if (!report.cells.empty()) {
            const auto& prev = report.cells.back();
            const double prev_se = prev.type1_error.se_defined() ? prev.type1_error.se : 0.0;
            const double spread = 3.0 * std::sqrt(se * se + prev_se * prev_se);
            cell.nonmonotone = cell.type1_error.value - prev.type1_error.value > spread;
        }
        if (cell.qualifies && !report.selected) {
            report.selected = report.cells.size();
        }
        report.cells.push_back(cell);
    }
    return report;
}

std::vector<SweepRow> sweep_frequencies(const OCConfig& cfg, const FrequencyGrid& grid,
                                        double reference_theta) {
    if (grid.waits.empty() || grid.steps.empty() || grid.affirms.empty() || grid.caps.empty()) {
        throw InvalidInput("sweep grids must not be empty");
    }
    cfg.validate();
    const std::size_t null_idx = effect_index(cfg, 0.0);
    const std::size_t ref_idx = effect_index(cfg, reference_theta);

    std::vector<SweepRow> rows;
    for (int w : grid.waits) {
        for (int s : grid.steps) {
            for (int a : grid.affirms) {
                MonitoringPlan plan = cfg.plan;
                plan.wait = w;
                plan.step = s;
                plan.affirm = a;
                const auto null_curve = capped_rejection(cfg, null_idx, plan, grid.caps);
                const auto ref_curve = capped_rejection(cfg, ref_idx, plan, grid.caps);
                for (std::size_t k = 0; k < grid.caps.size(); ++k) {
                    SweepRow row;
                    row.wait = w;
                    row.step = s;
                    row.affirm = a;
                    row.max_n = grid.caps[k];
                    row.valid = null_curve[k].valid;
                    row.type1_error = null_curve[k].reject_rate;
                    row.power = ref_curve[k].reject_rate;
                    row.avg_n_null = null_curve[k].avg_n;
                    row.avg_n_reference = ref_curve[k].avg_n;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

}  // namespace seqsgpv
