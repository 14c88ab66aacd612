#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "seqsgpv/designs.hpp"
#include "seqsgpv/regions.hpp"
#include "seqsgpv/rng.hpp"

namespace seqsgpv {

enum class AffirmMode { Forward, Backward };
enum class IntervalFamily { ZPooled, TPooled };
enum class Randomization { Alternating, BlockTwo };
enum class Arm { Control, Treatment };

/// Monitoring frequency. All counts are total observed outcomes across both
/// arms.
struct MonitoringPlan {
    int wait = 4;                ///< W: outcomes observed before the first look
    int step = 1;                ///< S: outcomes between looks
    int affirm = 0;              ///< A: outcomes before an alert may be affirmed
    std::optional<int> max_n;    ///< N: enrollment cap; nullopt = unrestricted
    AffirmMode affirm_mode = AffirmMode::Forward;
    double interval_level = 0.95;
    IntervalFamily interval_family = IntervalFamily::ZPooled;

    /// Throws InvalidInput.
    void validate() const;

    friend bool operator==(const MonitoringPlan&, const MonitoringPlan&) = default;
};

struct NormalOutcomes {
    double sd = 1.0;  ///< per-arm standard deviation

    friend bool operator==(const NormalOutcomes&, const NormalOutcomes&) = default;
};

/// Resample control outcomes Y(0) from a pool; treated outcomes are
/// Y(0) + theta.
struct BootstrapPool {
    std::shared_ptr<const std::vector<double>> values;

    friend bool operator==(const BootstrapPool& a, const BootstrapPool& b) {
        if (a.values == b.values) {
            return true;
        }
        return a.values && b.values && *a.values == *b.values;
    }
};

struct OutcomeModel {
    std::variant<NormalOutcomes, BootstrapPool> kind = NormalOutcomes{};
    double theta = 0.0;
    /// Enrollments between a subject's randomization and outcome availability.
    int lag = 0;
    Randomization randomization = Randomization::Alternating;

    void validate() const;

    friend bool operator==(const OutcomeModel&, const OutcomeModel&) = default;
};

/// Sequential arm assignment. Alternating starts with control; BlockTwo
/// shuffles each consecutive pair.
class Randomizer {
public:
    explicit Randomizer(Randomization scheme) : scheme_(scheme) {}

    /// Arm for subject `index` (1-based). Indices must be consecutive.
    Arm assign(std::int64_t index, Rng& rng);

private:
    Randomization scheme_;
    std::int64_t last_index_ = 0;
    Arm first_of_pair_ = Arm::Control;
};

struct Observation {
    Arm arm;
    double value;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Subjects in enrollment order: arm, then outcome, drawn from one rng.
class SubjectStream {
public:
    SubjectStream(const OutcomeModel& model, Rng& rng);
    Observation next();

private:
    const OutcomeModel& model_;
    Rng& rng_;
    Randomizer randomizer_;
    std::int64_t index_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Running per-arm moments (Welford).
class ArmStats {
public:
    void add(double y) noexcept {
        ++n_;
        const double delta = y - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (y - mean_);
    }
    std::int64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double sum_squares() const noexcept { return m2_; }

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct EffectEstimate {
    double estimate;
    Interval interval;
};

/// Pooled-variance interval for mean(treatment) - mean(control). Critical
/// values are cached so one estimator can be shared by concurrent trials.
class IntervalEstimator {
public:
    /// Caches t critical values up to `max_total` outcomes.
    IntervalEstimator(IntervalFamily family, double level, int max_total = 0);

    /// nullopt when either arm has < 2 outcomes or pooled variance is 0.
    std::optional<EffectEstimate> operator()(const ArmStats& control,
                                             const ArmStats& treatment) const;

    double critical_value(std::int64_t df) const;

private:
    IntervalFamily family_;
    double level_;
    double z_;
    std::vector<double> t_table_;  // indexed by df
};

std::optional<EffectEstimate> estimate_interval(std::span<const double> control,
                                                std::span<const double> treatment,
                                                const MonitoringPlan& plan);

enum class StopKind { AffirmedAlert, CapReached, NeverStopped };

struct StopReason {
    StopKind kind = StopKind::NeverStopped;
    AlertStatus alert = AlertStatus::None;  ///< the affirmed alert, if any

    friend bool operator==(const StopReason&, const StopReason&) = default;
};

struct TrialResult {
    int n_observed_at_stop = 0;
    int n_enrolled_final = 0;
    StopReason stop;
    std::optional<Interval> interval_at_stop;
    std::optional<Interval> interval_final;
    double estimate_at_stop = std::numeric_limits<double>::quiet_NaN();
    double estimate_final = std::numeric_limits<double>::quiet_NaN();
    Conclusion conclusion_at_stop;
    Conclusion conclusion_final;
    int looks = 0;
    std::vector<bool> per_look_reject;       ///< filled when record_looks
    std::vector<bool> probe_reject;          ///< one bit per probe reached
    std::vector<Observation> outcomes;       ///< filled when record_outcomes

    bool reversed() const noexcept {
        return conclusion_at_stop.reject_null != conclusion_final.reject_null;
    }
};

struct TrialOptions {
    /// Observed-outcome ceiling for unrestricted plans.
    int ceiling = 5000;
    bool record_looks = false;
    bool record_outcomes = false;
    /// Ascending observed counts at which to record whether the current
    /// interval rejects the null, look or not.
    std::span<const int> probes = {};
    /// Shared estimator; built per call when null.
    const IntervalEstimator* estimator = nullptr;
};

/// Simulates one monitored two-arm trial. Deterministic in (inputs, rng state).
TrialResult run_trial(const Design& design, const MonitoringPlan& plan, const OutcomeModel& model,
                      Rng& rng, const TrialOptions& options = {});

/// Largest total outcome count a trial may observe (cap or ceiling, plus lag).
int max_observed(const MonitoringPlan& plan, const OutcomeModel& model, int ceiling);

}  // namespace seqsgpv
