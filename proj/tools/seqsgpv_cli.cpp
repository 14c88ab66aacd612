#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqsgpv/calibrate.hpp"
#include "seqsgpv/config.hpp"
#include "seqsgpv/error.hpp"
#include "seqsgpv/oc.hpp"
#include "seqsgpv/parallel.hpp"
#include "seqsgpv/regions.hpp"
#include "seqsgpv/report.hpp"
#include "seqsgpv/version.hpp"

namespace fs = std::filesystem;
using namespace seqsgpv;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kData = 3, kRuntime = 4 };

struct BatchArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out = ".";
    std::optional<std::string> pool;
};

void add_batch_flags(CLI::App* sub, BatchArgs& args) {
    sub->add_option("--config", args.config, "JSON run configuration")->required();
    sub->add_option("--seed", args.seed, "master seed (overrides the config)");
    sub->add_option("--workers", args.workers, "worker threads (0 = hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--pool", args.pool, "bootstrap outcome pool (overrides model.pool)");
}

Interval parse_interval(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw InvalidInput(std::string(what) + " must be written lo,hi");
    }
    const auto number = [&](std::string_view token) {
        while (!token.empty() && token.front() == ' ') {
            token.remove_prefix(1);
        }
        if (!token.empty() && token.front() == '+') {
            token.remove_prefix(1);
        }
        double v = 0.0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || end != token.data() + token.size()) {
            throw InvalidInput(std::string(what) + ": cannot parse \"" + std::string(token) + "\"");
        }
        return v;
    };
    const std::string_view all(text);
    return Interval(number(all.substr(0, comma)), number(all.substr(comma + 1)));
}

RunSpec load(const BatchArgs& args) {
    RunSpec spec = parse_config(args.config);
    if (args.seed) {
        spec.oc.master_seed = *args.seed;
    }
    if (args.workers) {
        spec.oc.workers = *args.workers;
    }
    if (args.pool) {
        const auto pool = use_pool(spec, *args.pool);
        std::cerr << "pool " << *args.pool << ": n=" << pool.values.size()
                  << " mean=" << format_double(pool.mean) << " sd=" << format_double(pool.sd)
                  << " min=" << format_double(pool.min) << " max=" << format_double(pool.max)
                  << '\n';
    }
    return spec;
}

void emit(const BatchArgs& args, const RunSpec& spec, const std::string& name,
          const std::string& csv) {
    const fs::path dir(args.out);
    write_text_file(dir / (name + ".csv"), csv);
    const auto meta = run_metadata(spec, name, resolve_workers(spec.oc.workers));
    write_text_file(dir / (name + ".meta.json"), meta.dump(2) + "\n");
    std::cerr << "wrote " << (dir / (name + ".csv")).string() << '\n';
}

void require(bool present, const char* section) {
    if (!present) {
        throw ConfigError(std::string(section) + ": section required for this subcommand");
    }
}

int run_batch(const std::string& name, const BatchArgs& args) {
    const RunSpec spec = load(args);
    ensure_writable(args.out);
    const auto design = Design(spec.oc.design).label();
    std::ostringstream csv;
    if (name == "simulate") {
        write_simulate_csv(csv, simulate_oc(spec.oc));
    } else if (name == "trajectory") {
        require(!spec.trajectory.empty(), "trajectory");
        write_trajectory_csv(csv, design, t1e_trajectory(spec.oc, spec.trajectory));
    } else if (name == "reversals") {
        require(!spec.reversal_lags.empty(), "reversals");
        write_reversals_csv(csv, design, spec.oc.plan,
                            reversal_analysis(spec.oc, spec.reversal_lags));
    } else if (name == "calibrate") {
        require(!spec.calibrate_waits.empty(), "calibrate");
        const auto report = find_min_wait(spec.oc, spec.calibrate_waits, spec.alpha_target);
        write_calibrate_csv(csv, design, report);
        if (report.selected) {
            std::cout << "W=" << report.cells[*report.selected].wait << '\n';
        } else {
            std::cout << "no wait time in the grid attains alpha "
                      << format_double(report.alpha_target) << '\n';
        }
    } else if (name == "sweep") {
        require(!spec.sweep.empty(), "sweep");
        const double reference = *spec.sweep_reference_theta;
        write_sweep_csv(csv, design, reference,
                        sweep_frequencies(spec.oc, spec.sweep, reference));
    }
    emit(args, spec, name, csv.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential SGPV monitoring and operating-characteristics simulator"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string interval_text;
    std::vector<std::string> region_texts;
    auto* sgpv_cmd = app.add_subcommand("sgpv", "SGPV of an interval against a region");
    sgpv_cmd->add_option("--interval", interval_text, "interval lo,hi")->required();
    sgpv_cmd->add_option("--region", region_texts,
                         "region part lo,hi (repeat for a union; inf allowed)")
        ->required();

    BatchArgs batch;
    const std::vector<std::pair<std::string, std::string>> batch_commands = {
        {"simulate", "operating characteristics over the effect grid"},
        {"trajectory", "Type I error over the maximum-sample-size grid"},
        {"reversals", "conclusion reversals under delayed outcomes"},
        {"calibrate", "smallest wait time meeting a Type I error target"},
        {"sweep", "Type I error, power and sample size over (W, S, A, N)"},
    };
    std::vector<CLI::App*> batch_apps;
    for (const auto& [name, help] : batch_commands) {
        auto* sub = app.add_subcommand(name, help);
        add_batch_flags(sub, batch);
        batch_apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*sgpv_cmd) {
            const Interval i = parse_interval(interval_text, "--interval");
            std::vector<Interval> parts;
            for (const auto& r : region_texts) {
                parts.push_back(parse_interval(r, "--region"));
            }
            std::cout << format_double(sgpv(i, Region(std::span<const Interval>(parts)))) << '\n';
            return kOk;
        }
        for (auto* sub : batch_apps) {
            if (*sub) {
                return run_batch(sub->get_name(), batch);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}
