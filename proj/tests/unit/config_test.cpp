#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "seqsgpv/config.hpp"
#include "seqsgpv/error.hpp"

using namespace seqsgpv;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "design": {"type": "prism", "sidedness": "one-sided", "delta_g1": 0.15, "delta_g2": 0.5},
  "plan": {"W": 20, "S": 1, "A": 0, "N": "unrestricted"},
  "simulation": {"replicates": 100, "effects": [0, 0.5], "seed": 42}
})";

std::string error_of(const std::string& text, const fs::path& base = {}) {
    try {
        parse_config_text(text, base);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("seqsgpv_config_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("minimal one-sided config fills defaults") {
        const RunSpec spec = parse_config_text(kMinimal);
        const auto& p = std::get<PrismSpec>(spec.oc.design);
        CHECK(p.sidedness == Sidedness::OneSided);
        CHECK(p.direction == Direction::BenefitPositive);
        CHECK(spec.oc.plan.interval_level == 0.95);
        CHECK(spec.oc.plan.interval_family == IntervalFamily::ZPooled);
        CHECK(spec.oc.plan.affirm_mode == AffirmMode::Forward);
        CHECK_FALSE(spec.oc.plan.max_n.has_value());
        CHECK(spec.oc.model.randomization == Randomization::Alternating);
        CHECK(spec.oc.model.lag == 0);
        CHECK(std::get<NormalOutcomes>(spec.oc.model.kind).sd == 1.0);
        CHECK(spec.oc.master_seed == 42);
        CHECK(spec.oc.workers == 0);
        CHECK(spec.oc.ceiling == 5000);
    }

    TEST_CASE("PRISM ordering violation is rejected with its field path") {
        std::string text = kMinimal;
        text.replace(text.find("0.15"), 4, "0.60");
        const auto msg = error_of(text);
        CHECK(msg.find("design") != std::string::npos);
        CHECK(msg.find("delta") != std::string::npos);
    }

    TEST_CASE("round trip through the effective config") {
        const std::string full = R"({
          "design": {"type": "prism", "sidedness": "two-sided", "delta_l2": -0.5,
                     "delta_l1": -0.15, "delta_g1": 0.15, "delta_g2": 0.5, "null": 0},
          "plan": {"W": 30, "S": 10, "A": 10, "N": 1000, "affirm_mode": "backward",
                   "interval_level": 0.9, "interval_family": "t-pooled"},
          "model": {"kind": "normal", "sd": 2.5, "lag": 25, "randomization": "block-two"},
          "simulation": {"replicates": 10, "effects": [0, 0.1, 0.30000000000000004],
                         "seed": 18446744073709551615, "workers": 3, "ceiling": 2000},
          "trajectory": {"W": [20, 40], "S": [1, 10], "A": [0, 10], "N": [100, 500, 1000]},
          "reversals": {"lags": [0, 50, 100]},
          "calibrate": {"W": [4, 20, 145], "alpha_target": 0.04},
          "sweep": {"N": [200, 400], "reference_theta": 0.1}
        })";
        const RunSpec spec = parse_config_text(full);
        CHECK(spec.oc.master_seed == 18446744073709551615ULL);
        CHECK(spec.sweep.waits == std::vector<int>{30});
        const RunSpec again = parse_config_text(to_json(spec).dump());
        CHECK(again == spec);
        CHECK(to_json(again) == to_json(spec));

        const RunSpec minimal = parse_config_text(kMinimal);
        CHECK(parse_config_text(to_json(minimal).dump()) == minimal);

        const RunSpec roe = parse_config_text(R"({
          "design": {"type": "null-bound-roe", "delta1": 0.5},
          "plan": {"W": 145, "S": 1, "A": 0, "N": "unrestricted"},
          "simulation": {"replicates": 10, "effects": [0], "seed": 1}})");
        CHECK(parse_config_text(to_json(roe).dump()) == roe);
        const RunSpec rope = parse_config_text(R"({
          "design": {"type": "rope-only", "rope": [-0.2, 0.2]},
          "plan": {"W": 10, "S": 1, "A": 0, "N": 100},
          "simulation": {"replicates": 10, "effects": [0], "seed": 1}})");
        CHECK(parse_config_text(to_json(rope).dump()) == rope);
    }

    TEST_CASE("unknown keys are errors") {
        std::string text = kMinimal;
        text.replace(text.find("\"seed\""), 6, "\"sede\": 1, \"seed\"");
        const auto msg = error_of(text);
        CHECK(msg.find("simulation.sede: unknown key") != std::string::npos);
        const auto top = error_of(R"({"design": {"type": "rope-only", "rope": [-1, 1], "delta_g1": 0.2},
            "plan": {"W": 4, "S": 1, "A": 0, "N": 10},
            "simulation": {"replicates": 1, "effects": [0], "seed": 1}, "extra": 1})");
        CHECK(top.find("extra: unknown key") != std::string::npos);
        CHECK(top.find("design.delta_g1: unknown key") != std::string::npos);
    }

    TEST_CASE("every missing key is listed at once") {
        const auto msg = error_of(R"({"design": {"type": "prism", "sidedness": "two-sided"},
            "plan": {"W": 20}, "simulation": {"effects": [0]}})");
        for (const char* key : {"design.delta_l2", "design.delta_l1", "design.delta_g1",
                                "design.delta_g2", "plan.S", "plan.A", "plan.N",
                                "simulation.replicates", "simulation.seed"}) {
            CHECK_MESSAGE(msg.find(std::string(key) + ": missing required key") != std::string::npos,
                          key);
        }
        CHECK(error_of("{}").find("design: missing") != std::string::npos);
    }

    TEST_CASE("type errors and bad enumerations") {
        std::string text = kMinimal;
        text.replace(text.find("\"W\": 20"), 7, "\"W\": \"twenty\"");
        CHECK(error_of(text).find("plan.W: expected an integer") != std::string::npos);
        text = kMinimal;
        text.replace(text.find("one-sided"), 9, "sideways");
        CHECK(error_of(text).find("design.sidedness: expected one of") != std::string::npos);
        CHECK(error_of("{not json").find("malformed JSON") != std::string::npos);
        text = kMinimal;
        text.replace(text.find("\"seed\": 42"), 10, "\"seed\": -1");
        CHECK(error_of(text).find("simulation.seed") != std::string::npos);
    }

    TEST_CASE("empty effect grid is rejected") {
        std::string text = kMinimal;
        text.replace(text.find("[0, 0.5]"), 8, "[]");
        CHECK(error_of(text).find("simulation.effects: must not be empty") != std::string::npos);
    }

    TEST_CASE("null-based analyses need a zero effect") {
        std::string text = kMinimal;
        text.replace(text.find("[0, 0.5]"), 8, "[0.5]");
        text.insert(text.rfind('}'), R"(, "reversals": {"lags": [0]})");
        CHECK(error_of(text).find("must contain 0") != std::string::npos);
    }

    TEST_CASE("pool ingestion") {
        const auto dir = scratch_dir("pool");
        write(dir / "three.txt", "1.0\n2.0\n3.0");
        const auto pool = ingest_pool(dir / "three.txt");
        CHECK(pool.values.size() == 3);
        CHECK(pool.mean == doctest::Approx(2.0));
        CHECK(pool.sd == doctest::Approx(1.0));
        CHECK(pool.min == 1.0);
        CHECK(pool.max == 3.0);

        write(dir / "header.csv", "hba1c\n0.5\n\n1.5\n");
        CHECK(ingest_pool(dir / "header.csv").values.size() == 2);

        write(dir / "bad.txt", "1.0\nabc\n3.0\n");
        try {
            ingest_pool(dir / "bad.txt");
            FAIL("expected a data error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
        write(dir / "empty.txt", "\n\n");
        CHECK_THROWS_AS(ingest_pool(dir / "empty.txt"), DataError);
        write(dir / "header_only.txt", "value\n");
        CHECK_THROWS_AS(ingest_pool(dir / "header_only.txt"), DataError);
        write(dir / "nan.txt", "1\nnan\n");
        CHECK_THROWS_AS(ingest_pool(dir / "nan.txt"), DataError);
        CHECK_THROWS_AS(ingest_pool(dir / "missing.txt"), DataError);
    }

    TEST_CASE("bootstrap pool paths resolve against the config directory") {
        const auto dir = scratch_dir("bootstrap");
        fs::create_directories(dir / "data");
        write(dir / "data" / "pool.txt", "0\n1\n2\n3\n");
        write(dir / "run.json", R"({
          "design": {"type": "prism", "sidedness": "one-sided", "delta_g1": 0.15, "delta_g2": 0.5},
          "plan": {"W": 20, "S": 1, "A": 0, "N": 100},
          "model": {"kind": "bootstrap", "pool": "data/pool.txt"},
          "simulation": {"replicates": 10, "effects": [0], "seed": 3}})");
        const RunSpec spec = parse_config(dir / "run.json");
        const auto& pool = std::get<BootstrapPool>(spec.oc.model.kind);
        CHECK(pool.values->size() == 4);
        CHECK(spec.pool_path == fs::path("data/pool.txt"));
        CHECK(to_json(spec)["model"]["pool"] == "data/pool.txt");
        CHECK(parse_config_text(to_json(spec).dump(), dir) == spec);

        write(dir / "sd.json", R"({
          "design": {"type": "prism", "sidedness": "one-sided", "delta_g1": 0.15, "delta_g2": 0.5},
          "plan": {"W": 20, "S": 1, "A": 0, "N": 100},
          "model": {"kind": "bootstrap", "pool": "data/pool.txt", "sd": 2},
          "simulation": {"replicates": 10, "effects": [0], "seed": 3}})");
        CHECK_THROWS_AS(parse_config(dir / "sd.json"), ConfigError);
        CHECK_THROWS_AS(parse_config(dir / "absent.json"), ConfigError);
    }
}
