#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "seqsgpv/designs.hpp"
#include "seqsgpv/engine.hpp"

namespace seqsgpv {

/// A Monte Carlo estimate with its standard error. The error is NaN
/// (undefined) when fewer than two replicates were run.
struct Estimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();

    bool se_defined() const noexcept { return !std::isnan(se); }

    friend bool operator==(const Estimate& a, const Estimate& b) {
        const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
        return same(a.value, b.value) && same(a.se, b.se);
    }
};

Estimate rate_estimate(std::int64_t hits, std::int64_t n);

struct OCConfig {
    DesignSpec design;
    MonitoringPlan plan;
    /// Template; theta is replaced by each entry of `effects`.
    OutcomeModel model;
    std::vector<double> effects;
    int replicates = 1000;
    std::uint64_t master_seed = 0;
    int workers = 0;  ///< 0 = hardware concurrency
    /// Observed-outcome ceiling applied when plan.max_n is unrestricted.
    int ceiling = 5000;

    void validate() const;

    friend bool operator==(const OCConfig&, const OCConfig&) = default;
};

struct EffectSummary {
    double theta = 0.0;
    int replicates = 0;
    Estimate reject_null_rate;          ///< final interval rejects the null
    Estimate reject_null_at_stop_rate;  ///< stopping interval rejects the null
    Estimate inconclusive_rate;
    Estimate ruled_out_meaningful_rate;
    Estimate ruled_out_null_equiv_rate;
    Estimate mild_effect_rate;
    Estimate avg_n_observed;
    double sd_n = std::numeric_limits<double>::quiet_NaN();
    Estimate avg_n_enrolled;
    Estimate stop_early_prob;     ///< affirmed alert before the cap/ceiling
    Estimate still_running_rate;  ///< reached the ceiling of an unrestricted plan
    Estimate bias;                ///< mean(final estimate) - theta
    Estimate coverage;            ///< final interval contains theta
    Estimate reversal_reject_to_accept;
    Estimate reversal_accept_to_reject;
    Estimate reversal_total;
    int not_estimable = 0;  ///< replicates without a final interval
};

struct OCSummary {
    std::string design;
    std::vector<EffectSummary> effects;
};

/// Runs replicates x effects independent trials. Replicate r of effect e uses
/// the stream stream_seed(master_seed, e, r); the result is identical for any
/// worker count.
OCSummary simulate_oc(const OCConfig& cfg);

/// Aggregates one effect's trial results (in replicate order).
EffectSummary summarize(double theta, std::span<const TrialResult> results,
                        const MonitoringPlan& plan, int ceiling);

struct FrequencyGrid {
    std::vector<int> waits;
    std::vector<int> steps;
    std::vector<int> affirms;
    std::vector<int> caps;  ///< ascending candidate maximum sample sizes

    bool empty() const noexcept {
        return waits.empty() && steps.empty() && affirms.empty() && caps.empty();
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

struct CapPoint {
    int max_n = 0;
    bool valid = false;  ///< false when max_n < W
    Estimate reject_rate;
    double avg_n = std::numeric_limits<double>::quiet_NaN();
};

/// Rejection probability and average sample size of the plan truncated at
/// each cap, from a single run of unrestricted trials with rejection probes
/// at the caps. plan.max_n is ignored.
std::vector<CapPoint> capped_rejection(const OCConfig& cfg, std::size_t effect_index,
                                       const MonitoringPlan& plan, std::span<const int> caps);

struct TrajectoryPoint {
    int wait = 0;
    int step = 0;
    int affirm = 0;
    int max_n = 0;
    bool valid = false;
    Estimate type1_error;
    double avg_n = std::numeric_limits<double>::quiet_NaN();
};

/// Type I error (theta = 0) over the cap grid for every (W, S, A) cell.
std::vector<TrajectoryPoint> t1e_trajectory(const OCConfig& cfg, const FrequencyGrid& grid);

struct ReversalRow {
    int lag = 0;
    Estimate reject_to_accept;
    Estimate accept_to_reject;
    Estimate total;
    Estimate type1_at_stop;
    Estimate type1_final;
    double avg_n_observed = 0.0;
    double avg_n_enrolled = 0.0;
};

/// Reversal probabilities under theta = 0 for each lag. Every lag reuses the
/// same replicate streams.
std::vector<ReversalRow> reversal_analysis(const OCConfig& cfg, std::span<const int> lags);

/// Index of `theta` in cfg.effects; throws InvalidInput when absent.
std::size_t effect_index(const OCConfig& cfg, double theta);

}  // namespace seqsgpv
