#include "seqsgpv/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "seqsgpv/error.hpp"
#include "seqsgpv/version.hpp"

namespace seqsgpv {
namespace {

class Row {
public:
    explicit Row(std::ostream& out) : out_(out) {}
    ~Row() { out_ << '\n'; }
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;

    Row& operator<<(std::string_view s) { return cell(s); }
    Row& operator<<(double x) { return cell(format_double(x)); }
    Row& operator<<(int x) { return cell(std::to_string(x)); }
    Row& operator<<(bool b) { return cell(b ? "1" : "0"); }
    Row& operator<<(const Estimate& e) {
        *this << e.value;
        return *this << e.se;
    }

private:
    Row& cell(std::string_view s) {
        if (!first_) {
            out_ << ',';
        }
        first_ = false;
        out_ << s;
        return *this;
    }

    std::ostream& out_;
    bool first_ = true;
};

void header(std::ostream& out, std::initializer_list<std::string_view> names) {
    Row row(out);
    for (auto n : names) {
        row << n;
    }
}

std::string cap_text(const MonitoringPlan& plan) {
    return plan.max_n ? std::to_string(*plan.max_n) : "unrestricted";
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "NA";
    }
    if (std::isinf(x)) {
        return x > 0 ? "Inf" : "-Inf";
    }
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

void ensure_writable(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const auto probe = dir / ".seqsgpv-write-probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "ok") || !f.flush()) {
            throw OutputError("output directory " + dir.string() + " is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

void write_simulate_csv(std::ostream& out, const OCSummary& summary) {
    header(out, {"design", "theta", "replicates",
                 "reject_null", "reject_null_se",
                 "reject_null_at_stop", "reject_null_at_stop_se",
                 "inconclusive", "inconclusive_se",
                 "ruled_out_meaningful", "ruled_out_meaningful_se",
                 "ruled_out_null_equivalent", "ruled_out_null_equivalent_se",
                 "mild_effect", "mild_effect_se",
                 "avg_n_observed", "avg_n_observed_se",
                 "sd_n",
                 "avg_n_enrolled", "avg_n_enrolled_se",
                 "stop_early", "stop_early_se",
                 "still_running", "still_running_se",
                 "bias", "bias_se",
                 "coverage", "coverage_se",
                 "reversal_reject_to_accept", "reversal_reject_to_accept_se",
                 "reversal_accept_to_reject", "reversal_accept_to_reject_se",
                 "reversal_total", "reversal_total_se",
                 "not_estimable"});
    for (const auto& e : summary.effects) {
        Row(out) << summary.design << e.theta << e.replicates << e.reject_null_rate
                 << e.reject_null_at_stop_rate << e.inconclusive_rate
                 << e.ruled_out_meaningful_rate << e.ruled_out_null_equiv_rate << e.mild_effect_rate
                 << e.avg_n_observed << e.sd_n << e.avg_n_enrolled << e.stop_early_prob
                 << e.still_running_rate << e.bias << e.coverage << e.reversal_reject_to_accept
                 << e.reversal_accept_to_reject << e.reversal_total << e.not_estimable;
    }
}

void write_trajectory_csv(std::ostream& out, std::string_view design,
                          const std::vector<TrajectoryPoint>& points) {
    header(out, {"design", "W", "S", "A", "N", "type1_error", "mc_se", "avg_n"});
    for (const auto& p : points) {
        Row(out) << design << p.wait << p.step << p.affirm << p.max_n << p.type1_error
                 << p.avg_n;
    }
}

void write_reversals_csv(std::ostream& out, std::string_view design, const MonitoringPlan& plan,
                         const std::vector<ReversalRow>& rows) {
    header(out, {"design", "W", "S", "A", "N", "L",
                 "reject_to_accept", "reject_to_accept_se",
                 "accept_to_reject", "accept_to_reject_se",
                 "total", "total_se",
                 "type1_at_stop", "type1_at_stop_se",
                 "type1_final", "type1_final_se",
                 "avg_n_observed", "avg_n_enrolled"});
    const auto cap = cap_text(plan);
    for (const auto& r : rows) {
        Row(out) << design << plan.wait << plan.step << plan.affirm << std::string_view(cap)
                 << r.lag << r.reject_to_accept << r.accept_to_reject << r.total
                 << r.type1_at_stop << r.type1_final << r.avg_n_observed << r.avg_n_enrolled;
    }
}

void write_calibrate_csv(std::ostream& out, std::string_view design,
                         const CalibrationReport& report) {
    header(out, {"design", "alpha_target", "S", "A", "N", "W", "type1_error", "mc_se",
                 "upper_2se", "avg_n", "qualifies", "nonmonotone", "selected"});
    for (std::size_t k = 0; k < report.cells.size(); ++k) {
        const auto& c = report.cells[k];
        Row(out) << design << report.alpha_target << report.step << report.affirm
                 << report.max_n << c.wait << c.type1_error << c.upper_2se << c.avg_n
                 << c.qualifies << c.nonmonotone << (report.selected == k);
    }
}

void write_sweep_csv(std::ostream& out, std::string_view design, double reference_theta,
                     const std::vector<SweepRow>& rows) {
    header(out, {"design", "W", "S", "A", "N", "reference_theta", "type1_error", "mc_se",
                 "power", "power_se", "avg_n_null", "avg_n_reference"});
    for (const auto& r : rows) {
        Row(out) << design << r.wait << r.step << r.affirm << r.max_n << reference_theta
                 << r.type1_error << r.power << r.avg_n_null << r.avg_n_reference;
    }
}

std::uint64_t config_hash(const nlohmann::json& effective) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : effective.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json run_metadata(const RunSpec& spec, std::string_view subcommand, int workers) {
    const auto effective = to_json(spec);
    std::array<char, 17> hex{};
    const auto hash = config_hash(effective);
    const auto [end, ec] = std::to_chars(hex.data(), hex.data() + 16, hash, 16);
    std::string hash_text(hex.data(), end);
    hash_text.insert(0, 16 - hash_text.size(), '0');
    return {
        {"subcommand", subcommand},
        {"tool_version", kToolVersion},
        {"csv_schema_version", kCsvSchemaVersion},
        {"config_hash", "fnv1a64:" + hash_text},
        {"master_seed", spec.oc.master_seed},
        {"workers", workers},
        {"config", effective},
    };
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f || !f.write(text.data(), static_cast<std::streamsize>(text.size())) || !f.flush()) {
            throw OutputError("cannot write " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw OutputError("cannot write " + path.string() + ": " + ec.message());
    }
}

}  // namespace seqsgpv
