#include "seqsgpv/oc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqsgpv/error.hpp"
#include "seqsgpv/parallel.hpp"
#include "seqsgpv/rng.hpp"

namespace seqsgpv {

Estimate rate_estimate(std::int64_t hits, std::int64_t n) {
    Estimate e;
    if (n <= 0) {
        return e;
    }
    e.value = static_cast<double>(hits) / static_cast<double>(n);
    if (n >= 2) {
        e.se = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
    }
    return e;
}

namespace {

/// Mean and standard error of the mean, summed in the given order.
Estimate mean_estimate(std::span<const double> xs, double* sd_out = nullptr) {
    Estimate e;
    if (xs.empty()) {
        return e;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double n = static_cast<double>(xs.size());
    e.value = sum / n;
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - e.value) * (x - e.value);
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        e.se = sd / std::sqrt(n);
        if (sd_out != nullptr) {
            *sd_out = sd;
        }
    }
    return e;
}

std::vector<TrialResult> run_replicates(const OCConfig& cfg, const Design& design,
                                        std::size_t effect_idx, double theta,
                                        const MonitoringPlan& plan, int lag,
                                        std::span<const int> probes, int ceiling) {
    OutcomeModel model = cfg.model;
    model.theta = theta;
    model.lag = lag;
    plan.validate();
    model.validate();
    const IntervalEstimator estimator(
        plan.interval_family, plan.interval_level,
        plan.interval_family == IntervalFamily::TPooled ? max_observed(plan, model, ceiling) : 0);

    TrialOptions options;
    options.ceiling = ceiling;
    options.probes = probes;
    options.estimator = &estimator;

    std::vector<TrialResult> results(static_cast<std::size_t>(cfg.replicates));
    parallel_for(results.size(), cfg.workers, [&](std::size_t r) {
        Rng rng = make_stream(cfg.master_seed, effect_idx, r);
        results[r] = run_trial(design, plan, model, rng, options);
    });
    return results;
}

}  // namespace

void OCConfig::validate() const {
    if (replicates < 1) {
        throw InvalidInput("replicates must be >= 1");
    }
    if (effects.empty()) {
        throw InvalidInput("effects must not be empty");
    }
    for (double e : effects) {
        if (!std::isfinite(e)) {
            throw InvalidInput("effects must be finite");
        }
    }
    if (workers < 0) {
        throw InvalidInput("workers must be >= 0");
    }
    if (ceiling < plan.wait) {
        throw InvalidInput("ceiling must be >= plan.W");
    }
    plan.validate();
    model.validate();
    Design{design};
}

std::size_t effect_index(const OCConfig& cfg, double theta) {
    const auto it = std::find(cfg.effects.begin(), cfg.effects.end(), theta);
    if (it == cfg.effects.end()) {
        throw InvalidInput("effect " + std::to_string(theta) + " is not in the effect grid");
    }
    return static_cast<std::size_t>(it - cfg.effects.begin());
}

EffectSummary summarize(double theta, std::span<const TrialResult> results,
                        const MonitoringPlan& plan, int ceiling) {
    EffectSummary s;
    s.theta = theta;
    s.replicates = static_cast<int>(results.size());
    const std::int64_t n = static_cast<std::int64_t>(results.size());
    const int cap = plan.max_n.value_or(ceiling);

    std::int64_t reject_final = 0, reject_stop = 0, inconclusive = 0, meaningful = 0,
                 null_equiv = 0, mild = 0, early = 0, running = 0, r2a = 0, a2r = 0,
                 covered = 0, estimable = 0;
    std::vector<double> n_observed;
    std::vector<double> n_enrolled;
    std::vector<double> errors;
    n_observed.reserve(results.size());
    n_enrolled.reserve(results.size());
    errors.reserve(results.size());

    for (const auto& r : results) {
        const bool rs = r.conclusion_at_stop.reject_null;
        const bool rf = r.conclusion_final.reject_null;
        reject_stop += rs;
        reject_final += rf;
        r2a += rs && !rf;
        a2r += !rs && rf;
        switch (r.conclusion_final.category) {
            case ConclusionCategory::Inconclusive: ++inconclusive; break;
            case ConclusionCategory::RuledOutMeaningful: ++meaningful; break;
            case ConclusionCategory::RuledOutNullEquivalent: ++null_equiv; break;
            case ConclusionCategory::MildEffect: ++mild; break;
        }
        early += r.stop.kind == StopKind::AffirmedAlert && r.n_observed_at_stop < cap;
        running += r.stop.kind == StopKind::NeverStopped;
        n_observed.push_back(r.n_observed_at_stop);
        n_enrolled.push_back(r.n_enrolled_final);
        if (r.interval_final) {
            ++estimable;
            covered += r.interval_final->contains(theta);
            errors.push_back(r.estimate_final - theta);
        }
    }

    s.reject_null_rate = rate_estimate(reject_final, n);
    s.reject_null_at_stop_rate = rate_estimate(reject_stop, n);
    s.inconclusive_rate = rate_estimate(inconclusive, n);
    s.ruled_out_meaningful_rate = rate_estimate(meaningful, n);
    s.ruled_out_null_equiv_rate = rate_estimate(null_equiv, n);
    s.mild_effect_rate = rate_estimate(mild, n);
    s.avg_n_observed = mean_estimate(n_observed, &s.sd_n);
    s.avg_n_enrolled = mean_estimate(n_enrolled);
    s.stop_early_prob = rate_estimate(early, n);
    s.still_running_rate = rate_estimate(running, n);
    s.bias = mean_estimate(errors);
    s.coverage = rate_estimate(covered, estimable);
    s.reversal_reject_to_accept = rate_estimate(r2a, n);
    s.reversal_accept_to_reject = rate_estimate(a2r, n);
    s.reversal_total = rate_estimate(r2a + a2r, n);
    s.not_estimable = static_cast<int>(n - estimable);
    return s;
}

OCSummary simulate_oc(const OCConfig& cfg) {
    cfg.validate();
    const Design design(cfg.design);
    OCSummary summary;
    summary.design = design.label();
    for (std::size_t e = 0; e < cfg.effects.size(); ++e) {
        const double theta = cfg.effects[e];
        const auto results =
            run_replicates(cfg, design, e, theta, cfg.plan, cfg.model.lag, {}, cfg.ceiling);
        summary.effects.push_back(summarize(theta, results, cfg.plan, cfg.ceiling));
    }
    return summary;
}

std::vector<CapPoint> capped_rejection(const OCConfig& cfg, std::size_t effect_idx,
                                       const MonitoringPlan& plan, std::span<const int> caps) {
    if (!std::is_sorted(caps.begin(), caps.end()) ||
        std::adjacent_find(caps.begin(), caps.end()) != caps.end()) {
        throw InvalidInput("cap grid must be strictly ascending");
    }
    std::vector<CapPoint> points;
    std::vector<int> probes;
    for (int cap : caps) {
        CapPoint p;
        p.max_n = cap;
        p.valid = cap >= plan.wait;
        if (p.valid) {
            probes.push_back(cap);
        }
        points.push_back(p);
    }
    if (probes.empty()) {
        return points;
    }

    MonitoringPlan open = plan;
    open.max_n.reset();
    const Design design(cfg.design);
    const auto results = run_replicates(cfg, design, effect_idx, cfg.effects.at(effect_idx), open,
                                        0, probes, probes.back());

    std::size_t probe = 0;
    for (auto& p : points) {
        if (!p.valid) {
            continue;
        }
        std::int64_t hits = 0;
        std::int64_t n_total = 0;
        for (const auto& r : results) {
            if (r.n_observed_at_stop <= p.max_n) {
                hits += r.conclusion_at_stop.reject_null;
                n_total += r.n_observed_at_stop;
            } else {
                hits += r.probe_reject.at(probe);
                n_total += p.max_n;
            }
        }
        const auto count = static_cast<std::int64_t>(results.size());
        p.reject_rate = rate_estimate(hits, count);
        p.avg_n = static_cast<double>(n_total) / static_cast<double>(count);
        ++probe;
    }
    return points;
}

std::vector<TrajectoryPoint> t1e_trajectory(const OCConfig& cfg, const FrequencyGrid& grid) {
    cfg.validate();
    const std::size_t null_idx = effect_index(cfg, 0.0);
    std::vector<TrajectoryPoint> rows;
    for (int w : grid.waits) {
        for (int s : grid.steps) {
            for (int a : grid.affirms) {
                MonitoringPlan plan = cfg.plan;
                plan.wait = w;
                plan.step = s;
                plan.affirm = a;
                plan.max_n.reset();
                for (const auto& p : capped_rejection(cfg, null_idx, plan, grid.caps)) {
                    rows.push_back({w, s, a, p.max_n, p.valid, p.reject_rate, p.avg_n});
                }
            }
        }
    }
    return rows;
}

std::vector<ReversalRow> reversal_analysis(const OCConfig& cfg, std::span<const int> lags) {
    cfg.validate();
    const std::size_t null_idx = effect_index(cfg, 0.0);
    const Design design(cfg.design);
    std::vector<ReversalRow> rows;
    for (int lag : lags) {
        const auto results =
            run_replicates(cfg, design, null_idx, 0.0, cfg.plan, lag, {}, cfg.ceiling);
        const EffectSummary s = summarize(0.0, results, cfg.plan, cfg.ceiling);
        ReversalRow row;
        row.lag = lag;
        row.reject_to_accept = s.reversal_reject_to_accept;
        row.accept_to_reject = s.reversal_accept_to_reject;
        row.total = s.reversal_total;
        row.type1_at_stop = s.reject_null_at_stop_rate;
        row.type1_final = s.reject_null_rate;
        row.avg_n_observed = s.avg_n_observed.value;
        row.avg_n_enrolled = s.avg_n_enrolled.value;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace seqsgpv
