#include "seqsgpv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "seqsgpv/error.hpp"

namespace seqsgpv {

void MonitoringPlan::validate() const {
    if (wait < 4) {
        throw InvalidInput("plan.W must be >= 4 (two outcomes per arm)");
    }
    if (step < 1) {
        throw InvalidInput("plan.S must be >= 1");
    }
    if (affirm < 0) {
        throw InvalidInput("plan.A must be >= 0");
    }
    if (max_n && *max_n < wait) {
        throw InvalidInput("plan.N must be >= plan.W");
    }
    if (!(interval_level > 0.0 && interval_level < 1.0)) {
        throw InvalidInput("plan.interval_level must lie in (0, 1)");
    }
}

void OutcomeModel::validate() const {
    if (!std::isfinite(theta)) {
        throw InvalidInput("model.theta must be finite");
    }
    if (lag < 0) {
        throw InvalidInput("model.lag must be >= 0");
    }
    if (const auto* normal = std::get_if<NormalOutcomes>(&kind)) {
        if (!(normal->sd > 0.0) || !std::isfinite(normal->sd)) {
            throw InvalidInput("model.sd must be positive");
        }
    } else {
        const auto& pool = std::get<BootstrapPool>(kind);
        if (!pool.values || pool.values->empty()) {
            throw InvalidInput("bootstrap pool is empty");
        }
    }
}

Arm Randomizer::assign(std::int64_t index, Rng& rng) {
    if (index != last_index_ + 1) {
        throw InvalidInput("randomization indices must be consecutive from 1");
    }
    last_index_ = index;
    const bool first_in_pair = (index % 2) == 1;
    if (scheme_ == Randomization::Alternating) {
        return first_in_pair ? Arm::Control : Arm::Treatment;
    }
    if (first_in_pair) {
        first_of_pair_ = (rng() >> 63) != 0 ? Arm::Treatment : Arm::Control;
        return first_of_pair_;
    }
    return first_of_pair_ == Arm::Control ? Arm::Treatment : Arm::Control;
}

SubjectStream::SubjectStream(const OutcomeModel& model, Rng& rng)
    : model_(model), rng_(rng), randomizer_(model.randomization) {}

Observation SubjectStream::next() {
    const Arm arm = randomizer_.assign(++index_, rng_);
    const double shift = arm == Arm::Treatment ? model_.theta : 0.0;
    if (const auto* normal = std::get_if<NormalOutcomes>(&model_.kind)) {
        return {arm, shift + normal->sd * normal_(rng_)};
    }
    const auto& pool = *std::get<BootstrapPool>(model_.kind).values;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return {arm, pool[pick(rng_)] + shift};
}

namespace {

double two_sided_quantile(IntervalFamily family, double level, std::int64_t df) {
    const double p = 1.0 - (1.0 - level) / 2.0;
    if (family == IntervalFamily::ZPooled) {
        return boost::math::quantile(boost::math::normal_distribution<double>(), p);
    }
    return boost::math::quantile(
        boost::math::students_t_distribution<double>(static_cast<double>(df)), p);
}

}  // namespace

IntervalEstimator::IntervalEstimator(IntervalFamily family, double level, int max_total)
    : family_(family), level_(level), z_(two_sided_quantile(IntervalFamily::ZPooled, level, 0)) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidInput("interval level must lie in (0, 1)");
    }
    if (family_ == IntervalFamily::TPooled && max_total > 2) {
        t_table_.resize(static_cast<std::size_t>(max_total - 1));
        for (std::size_t df = 1; df < t_table_.size(); ++df) {
            t_table_[df] = two_sided_quantile(family_, level_, static_cast<std::int64_t>(df));
        }
    }
}

double IntervalEstimator::critical_value(std::int64_t df) const {
    if (family_ == IntervalFamily::ZPooled) {
        return z_;
    }
    if (df >= 1 && static_cast<std::size_t>(df) < t_table_.size()) {
        return t_table_[static_cast<std::size_t>(df)];
    }
    return two_sided_quantile(family_, level_, df);
}

std::optional<EffectEstimate> IntervalEstimator::operator()(const ArmStats& control,
                                                            const ArmStats& treatment) const {
    const std::int64_t nc = control.count();
    const std::int64_t nt = treatment.count();
    if (nc < 2 || nt < 2) {
        return std::nullopt;
    }
    const std::int64_t df = nc + nt - 2;
    const double pooled_var =
        (control.sum_squares() + treatment.sum_squares()) / static_cast<double>(df);
    if (!(pooled_var > 0.0)) {
        return std::nullopt;
    }
    const double se = std::sqrt(pooled_var * (1.0 / static_cast<double>(nc) +
                                              1.0 / static_cast<double>(nt)));
    const double half_width = critical_value(df) * se;
    const double estimate = treatment.mean() - control.mean();
    return EffectEstimate{estimate, Interval(estimate - half_width, estimate + half_width)};
}

std::optional<EffectEstimate> estimate_interval(std::span<const double> control,
                                                std::span<const double> treatment,
                                                const MonitoringPlan& plan) {
    ArmStats c;
    ArmStats t;
    for (double y : control) {
        c.add(y);
    }
    for (double y : treatment) {
        t.add(y);
    }
    const IntervalEstimator estimator(plan.interval_family, plan.interval_level);
    return estimator(c, t);
}

int max_observed(const MonitoringPlan& plan, const OutcomeModel& model, int ceiling) {
    return plan.max_n ? *plan.max_n : ceiling + model.lag;
}

namespace {

struct LookRecord {
    int count;
    AlertStatus alert;
};

class Monitor {
public:
    explicit Monitor(const MonitoringPlan& plan) : plan_(plan) {}

    /// Feed the alert from an estimable look at `count`. Returns the affirmed
    /// alert when the trial should stop.
    std::optional<AlertStatus> observe(int count, AlertStatus alert) {
        return plan_.affirm_mode == AffirmMode::Forward ? forward(count, alert)
                                                        : backward(count, alert);
    }

private:
    std::optional<AlertStatus> forward(int count, AlertStatus alert) {
        if (pending_ != AlertStatus::None) {
            if (count < target_) {
                return std::nullopt;
            }
            if (affirms(pending_, alert)) {
                return common_alert(pending_, alert);
            }
            pending_ = alert;
            target_ = count + plan_.affirm;
            return std::nullopt;
        }
        if (alert == AlertStatus::None) {
            return std::nullopt;
        }
        if (plan_.affirm == 0) {
            return alert;
        }
        pending_ = alert;
        target_ = count + plan_.affirm;
        return std::nullopt;
    }

    std::optional<AlertStatus> backward(int count, AlertStatus alert) {
        std::optional<AlertStatus> result;
        if (alert != AlertStatus::None) {
            if (plan_.affirm == 0) {
                result = alert;
            } else {
                // The reference look is the latest one at or before count - A.
                const int horizon = count - plan_.affirm;
                while (history_.size() >= 2 && history_[1].count <= horizon) {
                    history_.pop_front();
                }
                if (!history_.empty() && history_.front().count <= horizon &&
                    affirms(history_.front().alert, alert)) {
                    result = common_alert(history_.front().alert, alert);
                }
            }
        }
        history_.push_back({count, alert});
        return result;
    }

    const MonitoringPlan& plan_;
    AlertStatus pending_ = AlertStatus::None;
    int target_ = 0;
    std::deque<LookRecord> history_;
};

}  // namespace

TrialResult run_trial(const Design& design, const MonitoringPlan& plan, const OutcomeModel& model,
                      Rng& rng, const TrialOptions& options) {
    plan.validate();
    model.validate();
    const int cap = plan.max_n.value_or(options.ceiling);
    if (cap < plan.wait) {
        throw InvalidInput("observation ceiling " + std::to_string(cap) + " is below plan.W");
    }

    std::optional<IntervalEstimator> own_estimator;
    const IntervalEstimator* estimator = options.estimator;
    if (estimator == nullptr) {
        own_estimator.emplace(plan.interval_family, plan.interval_level,
                              plan.interval_family == IntervalFamily::TPooled
                                  ? max_observed(plan, model, options.ceiling)
                                  : 0);
        estimator = &*own_estimator;
    }

    TrialResult result;
    SubjectStream stream(model, rng);
    ArmStats control;
    ArmStats treatment;
    const auto observe_next = [&] {
        const Observation obs = stream.next();
        (obs.arm == Arm::Control ? control : treatment).add(obs.value);
        if (options.record_outcomes) {
            result.outcomes.push_back(obs);
        }
    };

    Monitor monitor(plan);
    std::size_t probe = 0;
    int next_look = plan.wait;
    int observed = 0;
    std::optional<EffectEstimate> current;
    bool current_fresh = false;

    while (observed < cap) {
        observe_next();
        ++observed;
        current_fresh = false;

        while (probe < options.probes.size() && options.probes[probe] < observed) {
            ++probe;
        }
        const bool is_probe = probe < options.probes.size() && options.probes[probe] == observed;
        const bool on_lattice = observed == next_look;
        if (on_lattice) {
            next_look += plan.step;
        }
        const bool is_look = on_lattice || (plan.max_n && observed == cap);
        if (!is_look && !is_probe) {
            continue;
        }

        current = (*estimator)(control, treatment);
        current_fresh = true;
        if (is_probe) {
            result.probe_reject.push_back(current && design.rejects_null(current->interval));
            ++probe;
        }
        if (!is_look) {
            continue;
        }
        ++result.looks;
        if (options.record_looks) {
            result.per_look_reject.push_back(current && design.rejects_null(current->interval));
        }
        if (!current) {
            continue;
        }
        if (auto affirmed = monitor.observe(observed, design.evaluate_alert(current->interval))) {
            result.stop = {StopKind::AffirmedAlert, *affirmed};
            break;
        }
    }
    if (result.stop.kind != StopKind::AffirmedAlert) {
        result.stop.kind = plan.max_n ? StopKind::CapReached : StopKind::NeverStopped;
    }
    if (!current_fresh) {
        current = (*estimator)(control, treatment);
    }

    result.n_observed_at_stop = observed;
    if (current) {
        result.interval_at_stop = current->interval;
        result.estimate_at_stop = current->estimate;
        result.conclusion_at_stop = design.classify_conclusion(current->interval);
    }

    // Subjects already enrolled but not yet observed report after the stop.
    const int pending = plan.max_n ? std::min(model.lag, *plan.max_n - observed) : model.lag;
    for (int k = 0; k < pending; ++k) {
        observe_next();
    }
    result.n_enrolled_final = observed + pending;
    if (pending > 0) {
        current = (*estimator)(control, treatment);
    }
    if (current) {
        result.interval_final = current->interval;
        result.estimate_final = current->estimate;
        result.conclusion_final = design.classify_conclusion(current->interval);
    }
    return result;
}

}  // namespace seqsgpv
