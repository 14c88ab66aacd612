// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional arguments select criteria by id (e.g. "3 5 E1").

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/sgpv_properties.hpp"
#include "../support/trial_oracle.hpp"
#include "seqsgpv/calibrate.hpp"
#include "seqsgpv/config.hpp"
#include "seqsgpv/oc.hpp"
#include "seqsgpv/regions.hpp"
#include "seqsgpv/report.hpp"

using namespace seqsgpv;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<Verdict()> run;
};

constexpr std::uint64_t kSeed = 20240501;
const std::vector<int> kCapGrid = {20,  30,  40,  50,   75,   100,  150,  200, 300,
                                   400, 500, 750, 1000, 1500, 2000, 3000, 5000};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

std::string est(const Estimate& e) { return fmt(e.value) + " (SE " + fmt(e.se, 2) + ")"; }

PrismSpec one_sided_prism() {
    PrismSpec p;
    p.sidedness = Sidedness::OneSided;
    p.delta_g1 = 0.15;
    p.delta_g2 = 0.5;
    return p;
}

PrismSpec two_sided_prism() {
    PrismSpec p;
    p.delta_l2 = -0.5;
    p.delta_l1 = -0.15;
    p.delta_g1 = 0.15;
    p.delta_g2 = 0.5;
    return p;
}

NullBoundRoeSpec roe() { return NullBoundRoeSpec{0.0, 0.5, Direction::BenefitPositive}; }

OCConfig config(DesignSpec design, int wait, int step, int affirm, std::optional<int> cap,
                std::vector<double> effects, int replicates) {
    OCConfig cfg;
    cfg.design = std::move(design);
    cfg.plan.wait = wait;
    cfg.plan.step = step;
    cfg.plan.affirm = affirm;
    cfg.plan.max_n = cap;
    cfg.effects = std::move(effects);
    cfg.replicates = replicates;
    cfg.master_seed = kSeed;
    cfg.workers = 0;
    cfg.ceiling = 5000;
    return cfg;
}

double combined_se(const Estimate& a, const Estimate& b) {
    return std::sqrt(a.se * a.se + b.se * b.se);
}

// ---------------------------------------------------------------------------

Verdict sgpv_exactness() {
    const auto start = std::chrono::steady_clock::now();
    struct Case {
        Interval i;
        Region r;
        double expected;
    };
    const Case cases[] = {
        {Interval(-0.1, 0.1), Region{Interval(-0.15, 0.15)}, 1.0},
        {Interval(0.0, 0.3), Region{Interval(-0.15, 0.15)}, 0.5},
        {Interval(-1.0, 1.0), Region{Interval(-0.15, 0.15)}, 0.5},
        {Interval(0.2, 0.6), Region{Interval(0.5, kInf)}, 0.25},
    };
    std::string detail;
    bool pass = true;
    for (const auto& c : cases) {
        const double p = sgpv(c.i, c.r);
        const bool ok = std::abs(p - c.expected) <= 4.0 * std::numeric_limits<double>::epsilon();
        pass = pass && ok;
        detail += fmt(p, 17) + (ok ? " " : "(!) ");
    }
    const auto failures = testing::check_sgpv_properties(10000, kSeed);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pass = pass && failures.empty() && seconds < 1.0;
    detail += "| 10000 property cases, " + std::to_string(failures.size()) + " failures";
    if (!failures.empty()) {
        detail += " (first: " + failures.front().property + ": " + failures.front().detail + ")";
    }
    detail += " | " + fmt(seconds, 3) + " s (limit 1 s)";
    return {pass, detail};
}

Verdict oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 pick(kSeed);
    const DesignSpec designs[] = {one_sided_prism(), two_sided_prism(), roe(),
                                  RopeOnlySpec{Interval(-0.15, 0.15), 0.0}};
    int mismatches = 0;
    std::string first;
    for (int k = 0; k < 1000; ++k) {
        const DesignSpec& spec = designs[k % 4];
        MonitoringPlan plan;
        plan.wait = std::uniform_int_distribution<int>(4, 10)(pick);
        plan.step = 1;
        plan.affirm = (k / 4) % 2 == 0 ? 0 : 3;
        plan.max_n = std::uniform_int_distribution<int>(plan.wait, 60)(pick);
        plan.affirm_mode = (k / 8) % 2 == 0 ? AffirmMode::Forward : AffirmMode::Backward;
        OutcomeModel model;
        model.theta = std::uniform_real_distribution<double>(-1.0, 1.0)(pick);
        model.lag = (k / 16) % 2 == 0 ? 0 : 5;
        Rng rng = make_stream(kSeed, 0, static_cast<std::uint64_t>(k));
        TrialOptions opts;
        opts.record_outcomes = true;
        const auto r = run_trial(Design(spec), plan, model, rng, opts);
        const auto naive = testing::naive_monitor(spec, plan, model.lag, r.outcomes);
        bool same = naive.at_stop && naive.at_final && r.n_observed_at_stop == naive.n_stop &&
                    r.n_enrolled_final == naive.n_final &&
                    (r.stop.kind == StopKind::AffirmedAlert) == naive.affirmed;
        if (same && naive.affirmed) {
            same = alert_bits(r.stop.alert) == naive.affirmed_bits;
        }
        if (same) {
            same = r.conclusion_at_stop.reject_null == testing::naive_reject(spec, *naive.at_stop) &&
                   r.conclusion_final.reject_null == testing::naive_reject(spec, *naive.at_final) &&
                   r.conclusion_at_stop.category ==
                       testing::naive_category(testing::naive_alert(spec, *naive.at_stop)) &&
                   r.conclusion_final.category ==
                       testing::naive_category(testing::naive_alert(spec, *naive.at_final));
        }
        if (!same) {
            if (mismatches == 0) {
                first = " (first mismatch: trial " + std::to_string(k) + ")";
            }
            ++mismatches;
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && seconds < 30.0,
            "1000 trials, " + std::to_string(mismatches) + " mismatches" + first + " | " +
                fmt(seconds, 3) + " s (limit 30 s)"};
}

// Criteria 3-5 share these runs.
struct Reference {
    EffectSummary prism;
    EffectSummary roe;
};

const Reference& reference_runs() {
    static const Reference ref = [] {
        Reference r;
        r.prism = simulate_oc(config(one_sided_prism(), 20, 1, 0, std::nullopt, {0.0}, 20000))
                      .effects.front();
        r.roe = simulate_oc(config(roe(), 145, 1, 0, std::nullopt, {0.0}, 20000)).effects.front();
        return r;
    }();
    return ref;
}

Verdict type1_band(const EffectSummary& s) {
    const double v = s.reject_null_rate.value;
    return {std::abs(v - 0.05) <= 0.010,
            "Type I error " + est(s.reject_null_rate) + ", band 0.05 +/- 0.010; still running at "
            "ceiling " + fmt(s.still_running_rate.value)};
}

Verdict prism_calibration() { return type1_band(reference_runs().prism); }
Verdict roe_calibration() { return type1_band(reference_runs().roe); }

Verdict average_sample_size() {
    const auto& ref = reference_runs();
    const auto& a = ref.prism.avg_n_observed;
    const auto& b = ref.roe.avg_n_observed;
    const double sigma = (b.value - a.value) / combined_se(a, b);
    const bool pass = a.value >= 50.0 && a.value <= 66.0 && b.value >= 140.0 && b.value <= 176.0 &&
                      sigma >= 5.0;
    return {pass, "PRISM avg n " + est(a) + " in [50,66]; ROE avg n " + est(b) +
                      " in [140,176]; separation " + fmt(sigma, 3) + " sigma (>= 5)"};
}

Verdict frequency_suppression() {
    const auto cfg = config(one_sided_prism(), 20, 10, 10, std::nullopt, {0.0}, 20000);
    const auto rows = t1e_trajectory(cfg, {{20}, {10}, {10}, kCapGrid});
    double worst = 0.0;
    int worst_n = 0;
    for (const auto& r : rows) {
        if (r.type1_error.value > worst) {
            worst = r.type1_error.value;
            worst_n = r.max_n;
        }
    }
    return {worst < 0.040, "max Type I error over N in {20..5000} is " + fmt(worst) + " at N=" +
                               std::to_string(worst_n) + " (limit 0.040); at N=5000 " +
                               est(rows.back().type1_error)};
}

Verdict trajectory_shape() {
    const auto cfg = config(two_sided_prism(), 20, 1, 0, std::nullopt, {0.0}, 20000);
    const auto rows = t1e_trajectory(cfg, {{20}, {1}, {0}, kCapGrid});
    std::size_t peak = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].type1_error.value > rows[peak].type1_error.value) {
            peak = k;
        }
    }
    const std::size_t last = rows.size() - 1;
    if (peak == 0 || peak == last) {
        return {false, "no interior maximum: peak at N=" + std::to_string(rows[peak].max_n)};
    }
    // Paired standard error of the drop from the peak to the largest cap,
    // from the same replicate streams the trajectory used.
    const Design design(cfg.design);
    MonitoringPlan open = cfg.plan;
    OutcomeModel model = cfg.model;
    const std::vector<int> probes = {rows[peak].max_n, rows[last].max_n};
    TrialOptions opts;
    opts.ceiling = probes.back();
    opts.probes = probes;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < cfg.replicates; ++r) {
        Rng rng = make_stream(cfg.master_seed, 0, static_cast<std::uint64_t>(r));
        const auto t = run_trial(design, open, model, rng, opts);
        const auto at = [&](std::size_t k) {
            return t.n_observed_at_stop <= probes[k] ? t.conclusion_at_stop.reject_null
                                                     : static_cast<bool>(t.probe_reject.at(k));
        };
        const double d = static_cast<double>(at(0)) - static_cast<double>(at(1));
        sum += d;
        sum_sq += d * d;
    }
    const double n = cfg.replicates;
    const double drop = sum / n;
    const double se = std::sqrt((sum_sq / n - drop * drop) / (n - 1.0));
    const double expected_drop = rows[peak].type1_error.value - rows[last].type1_error.value;
    const bool consistent = std::abs(drop - expected_drop) < 1e-12;
    const bool pass = consistent && drop > 3.0 * se;
    return {pass, "rises from " + fmt(rows.front().type1_error.value) + " (N=20) to peak " +
                      fmt(rows[peak].type1_error.value) + " (N=" +
                      std::to_string(rows[peak].max_n) + "), falls to " +
                      fmt(rows[last].type1_error.value) + " (N=5000); drop " + fmt(drop) +
                      " = " + fmt(drop / se, 3) + " paired SE (> 3)"};
}

Verdict reversals() {
    const std::vector<int> lags = {0, 25, 50, 75, 100};
    const auto prism10 =
        reversal_analysis(config(one_sided_prism(), 20, 10, 10, std::nullopt, {0.0}, 50000), lags);
    const auto roe10 =
        reversal_analysis(config(roe(), 145, 10, 10, std::nullopt, {0.0}, 50000), lags);
    const auto prism0 =
        reversal_analysis(config(one_sided_prism(), 20, 10, 0, std::nullopt, {0.0}, 50000), lags);
    const auto roe0 =
        reversal_analysis(config(roe(), 145, 10, 0, std::nullopt, {0.0}, 50000), lags);

    const double ratio = roe10.back().total.value / prism10.back().total.value;
    bool zero_at_l0 = true;
    for (const auto* rows : {&prism10, &roe10, &prism0, &roe0}) {
        zero_at_l0 = zero_at_l0 && rows->front().total.value == 0.0;
    }
    bool monotone_in_a = true;
    std::string worst;
    double worst_z = -kInf;
    const auto compare = [&](const std::vector<ReversalRow>& a0, const std::vector<ReversalRow>& a10,
                             const char* name) {
        for (std::size_t k = 1; k < lags.size(); ++k) {
            const double se = combined_se(a0[k].total, a10[k].total);
            const double z = (a10[k].total.value - a0[k].total.value) / se;
            monotone_in_a = monotone_in_a && z <= 3.0;
            if (z > worst_z) {
                worst_z = z;
                worst = std::string(name) + " L=" + std::to_string(lags[k]);
            }
        }
    };
    compare(prism0, prism10, "PRISM");
    compare(roe0, roe10, "ROE");
    const bool pass = ratio >= 1.15 && ratio <= 1.70 && zero_at_l0 && monotone_in_a;
    return {pass, "L=100: ROE " + est(roe10.back().total) + " / PRISM " +
                      est(prism10.back().total) + " = " + fmt(ratio, 3) +
                      " (in [1.15,1.70]); L=0 reversals exactly 0: " +
                      (zero_at_l0 ? "yes" : "no") + "; A=10 vs A=0 at S=10: largest excess " +
                      fmt(worst_z, 3) + " SE at " + worst + " (<= 3)"};
}

Verdict single_look_power() {
    const auto z_big =
        simulate_oc(config(two_sided_prism(), 1000, 1, 0, 1000, {0.0}, 20000)).effects.front();
    auto t_cfg = config(two_sided_prism(), 20, 1, 0, 20, {0.0}, 20000);
    t_cfg.plan.interval_family = IntervalFamily::TPooled;
    const auto t_small = simulate_oc(t_cfg).effects.front();
    const auto z_small =
        simulate_oc(config(two_sided_prism(), 20, 1, 0, 20, {0.0}, 20000)).effects.front();
    const auto single_large =
        simulate_oc(config(two_sided_prism(), 20, 1, 0, 20, {5.0, -5.0}, 20000));
    const auto seq_large =
        simulate_oc(config(one_sided_prism(), 20, 1, 0, std::nullopt, {5.0}, 20000));

    const auto within = [](const Estimate& e) { return std::abs(e.value - 0.05) <= 3.0 * e.se; };
    double min_power = 1.0;
    for (const auto& e : single_large.effects) {
        min_power = std::min(min_power, e.reject_null_rate.value);
    }
    min_power = std::min(min_power, seq_large.effects.front().reject_null_rate.value);
    const bool pass = within(z_big.reject_null_rate) && within(t_small.reject_null_rate) &&
                      min_power >= 0.999;
    return {pass, "theta=0, N=W=1000 z-pooled: " + est(z_big.reject_null_rate) +
                      "; N=W=20 t-pooled: " + est(t_small.reject_null_rate) +
                      " (both within 3 SE of 0.05; N=W=20 z-pooled, not judged: " +
                      est(z_small.reject_null_rate) + "); |theta|=5 sd rejection >= " +
                      fmt(min_power, 6)};
}

Verdict determinism() {
    OCConfig cfg = config(two_sided_prism(), 20, 5, 5, 400, {0.0, 0.3, 0.5}, 3000);
    cfg.model.lag = 30;
    cfg.model.randomization = Randomization::BlockTwo;
    const FrequencyGrid grid{{20, 40}, {5}, {0, 5}, {50, 200, 400}};
    const std::vector<int> lags = {0, 30};
    const auto render = [&](int workers) {
        OCConfig c = cfg;
        c.workers = workers;
        std::ostringstream out;
        write_simulate_csv(out, simulate_oc(c));
        write_trajectory_csv(out, "prism-two-sided", t1e_trajectory(c, grid));
        write_reversals_csv(out, "prism-two-sided", c.plan, reversal_analysis(c, lags));
        write_calibrate_csv(out, "prism-two-sided", find_min_wait(c, std::vector<int>{8, 20}, 0.05));
        write_sweep_csv(out, "prism-two-sided", 0.5, sweep_frequencies(c, grid, 0.5));
        return out.str();
    };
    const std::string reference = render(1);
    std::string detail = std::to_string(reference.size()) + " CSV bytes with 1 worker;";
    bool pass = true;
    for (int workers : {2, 3, 8}) {
        const bool same = render(workers) == reference;
        pass = pass && same;
        detail += " " + std::to_string(workers) + " workers " + (same ? "identical" : "DIFFERENT") +
                  ";";
    }
    return {pass, detail};
}

// Substitute checks for the data-dependent results.

Verdict bootstrap_pool() {
    const auto dir = std::filesystem::temp_directory_path() / "seqsgpv_acceptance";
    std::filesystem::create_directories(dir);
    const auto path = dir / "synthetic_pool.txt";
    {
        std::mt19937_64 rng(kSeed);
        std::normal_distribution<double> hba1c(7.5, 1.0);
        std::ofstream out(path);
        out << "hba1c\n";
        out.precision(17);
        for (int k = 0; k < 10000; ++k) {
            out << hba1c(rng) << '\n';
        }
    }
    RunSpec spec;
    spec.oc = config(one_sided_prism(), 200, 1, 0, 200, {0.3}, 20000);
    const auto pool = use_pool(spec, path);
    const auto s = simulate_oc(spec.oc).effects.front();
    const bool bias_ok = std::abs(s.bias.value) <= 3.0 * s.bias.se;
    const bool coverage_ok = std::abs(s.coverage.value - 0.95) <= 3.0 * s.coverage.se;
    return {pool.values.size() == 10000 && bias_ok && coverage_ok,
            "pool n=" + std::to_string(pool.values.size()) + " mean " + fmt(pool.mean) +
                "; theta=0.3 single look N=200: bias " + est(s.bias) + ", coverage " +
                est(s.coverage) + " (each within 3 SE of 0 / 0.95)"};
}

Verdict affirmation_ordering() {
    PrismSpec p;
    p.sidedness = Sidedness::OneSided;
    p.direction = Direction::BenefitNegative;
    p.delta_l2 = -0.5;
    p.delta_l1 = -0.15;
    const auto run = [&](int affirm, int lag) {
        auto cfg = config(p, 55, 25, affirm, 512, {0.0}, 20000);
        cfg.model.lag = lag;
        return simulate_oc(cfg).effects.front();
    };
    const auto a0 = run(0, 0);
    const auto a25 = run(25, 0);
    const auto a0_lag = run(0, 300);
    const auto a25_lag = run(25, 300);
    const auto z = [](const Estimate& lower, const Estimate& higher) {
        return (higher.value - lower.value) / combined_se(lower, higher);
    };
    // Positive z means the expected ordering holds.
    const double t1e = z(a25.reject_null_rate, a0.reject_null_rate);
    const double rev = z(a25_lag.reversal_total, a0_lag.reversal_total);
    const double avg_n = z(a0.avg_n_observed, a25.avg_n_observed);
    const bool pass = t1e >= -3.0 && rev >= -3.0 && avg_n >= -3.0;
    return {pass, "W=55,S=25,N=512: Type I error A=0 " + est(a0.reject_null_rate) + " vs A=25 " +
                      est(a25.reject_null_rate) + "; reversals at L=300 A=0 " +
                      est(a0_lag.reversal_total) + " vs A=25 " + est(a25_lag.reversal_total) +
                      "; avg n A=0 " + est(a0.avg_n_observed) + " vs A=25 " +
                      est(a25.avg_n_observed) + " (ordering margins " + fmt(t1e, 3) + ", " +
                      fmt(rev, 3) + ", " + fmt(avg_n, 3) + " SE; >= -3)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"1", "SGPV exactness", sgpv_exactness},
        {"2", "brute-force oracle equivalence", oracle_equivalence},
        {"3", "one-sided PRISM calibration (W=20)", prism_calibration},
        {"4", "null-bound ROE calibration (W=145)", roe_calibration},
        {"5", "average sample size PRISM vs ROE", average_sample_size},
        {"6", "frequency suppression (S=10, A=10)", frequency_suppression},
        {"7", "two-sided trajectory shape", trajectory_shape},
        {"8", "reversals under delayed outcomes", reversals},
        {"9", "single-look size and large-effect power", single_look_power},
        {"10", "determinism across worker counts", determinism},
        {"E1", "bootstrap pool bias and coverage", bootstrap_pool},
        {"E2", "affirmation A=25 vs A=0 ordering", affirmation_ordering},
    };
    std::set<std::string> selected(argv + 1, argv + argc);

    int failed = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ++ran;
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": "
                  << v.detail << "  (" << fmt(seconds, 3) << " s)" << std::endl;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
