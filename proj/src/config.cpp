#include "seqsgpv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "seqsgpv/error.hpp"

namespace seqsgpv {
namespace {

using nlohmann::json;

class Problems {
public:
    void add(const std::string& path, const std::string& what) {
        list_.push_back(path + ": " + what);
    }
    bool empty() const noexcept { return list_.empty(); }
    [[noreturn]] void raise() const {
        std::string msg = "invalid configuration (" + std::to_string(list_.size()) +
                          (list_.size() == 1 ? " problem)" : " problems)");
        for (const auto& p : list_) {
            msg += "\n  " + p;
        }
        throw ConfigError(msg);
    }

private:
    std::vector<std::string> list_;
};

/// One JSON object being read. Keys that are never taken are reported as
/// unknown by finish().
class Object {
public:
    Object(const json* node, std::string path, Problems& problems)
        : node_(node), path_(std::move(path)), problems_(problems) {
        if (node_ != nullptr && !node_->is_object()) {
            problems_.add(path_, "expected an object");
            node_ = nullptr;
        }
    }

    bool present() const noexcept { return node_ != nullptr; }
    const std::string& path() const noexcept { return path_; }
    std::string at(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* take(const std::string& key, bool required) {
        if (node_ == nullptr) {
            if (required) {
                problems_.add(at(key), "missing required key");
            }
            return nullptr;
        }
        taken_.insert(key);
        const auto it = node_->find(key);
        if (it == node_->end()) {
            if (required) {
                problems_.add(at(key), "missing required key");
            }
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const std::string& key, bool required = false) {
        const json* v = take(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            problems_.add(at(key), "expected a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::optional<int> integer(const std::string& key, bool required = false) {
        const json* v = take(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        return as_int(*v, at(key));
    }

    std::optional<std::string> text(const std::string& key, bool required = false) {
        const json* v = take(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            problems_.add(at(key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<std::vector<double>> numbers(const std::string& key, bool required = false) {
        const json* v = take(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_array()) {
            problems_.add(at(key), "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (const auto& x : *v) {
            if (!x.is_number()) {
                problems_.add(at(key), "expected an array of numbers");
                return std::nullopt;
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::optional<std::vector<int>> integers(const std::string& key, bool required = false) {
        const json* v = take(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_array()) {
            problems_.add(at(key), "expected an array of integers");
            return std::nullopt;
        }
        std::vector<int> out;
        for (const auto& x : *v) {
            const auto i = as_int(x, at(key));
            if (!i) {
                return std::nullopt;
            }
            out.push_back(*i);
        }
        return out;
    }

    Object child(const std::string& key, bool required = false) {
        return Object(take(key, required), at(key), problems_);
    }

    void finish() {
        if (node_ == nullptr) {
            return;
        }
        for (const auto& [key, value] : node_->items()) {
            if (!taken_.contains(key)) {
                problems_.add(at(key), "unknown key");
            }
        }
    }

    Problems& problems() { return problems_; }

private:
    std::optional<int> as_int(const json& v, const std::string& where) {
        if (!v.is_number_integer()) {
            problems_.add(where, "expected an integer");
            return std::nullopt;
        }
        const auto wide = v.get<std::int64_t>();
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT32_MAX)) {
            problems_.add(where, "integer out of range");
            return std::nullopt;
        }
        if (wide < INT32_MIN || wide > INT32_MAX) {
            problems_.add(where, "integer out of range");
            return std::nullopt;
        }
        return static_cast<int>(wide);
    }

    const json* node_;
    std::string path_;
    Problems& problems_;
    std::set<std::string> taken_;
};

template <class Enum>
std::optional<Enum> pick(Object& obj, const std::string& key,
                         std::initializer_list<std::pair<const char*, Enum>> choices,
                         bool required = false) {
    const auto value = obj.text(key, required);
    if (!value) {
        return std::nullopt;
    }
    for (const auto& [name, e] : choices) {
        if (*value == name) {
            return e;
        }
    }
    std::string allowed;
    for (const auto& [name, e] : choices) {
        allowed += allowed.empty() ? "" : ", ";
        allowed += name;
    }
    obj.problems().add(obj.at(key), "expected one of {" + allowed + "}, got \"" + *value + "\"");
    return std::nullopt;
}

constexpr std::initializer_list<std::pair<const char*, Sidedness>> kSidedness = {
    {"one-sided", Sidedness::OneSided}, {"two-sided", Sidedness::TwoSided}};
constexpr std::initializer_list<std::pair<const char*, Direction>> kDirection = {
    {"benefit-positive", Direction::BenefitPositive},
    {"benefit-negative", Direction::BenefitNegative}};
constexpr std::initializer_list<std::pair<const char*, AffirmMode>> kAffirmMode = {
    {"forward", AffirmMode::Forward}, {"backward", AffirmMode::Backward}};
constexpr std::initializer_list<std::pair<const char*, IntervalFamily>> kFamily = {
    {"z-pooled", IntervalFamily::ZPooled}, {"t-pooled", IntervalFamily::TPooled}};
constexpr std::initializer_list<std::pair<const char*, Randomization>> kRandomization = {
    {"alternating", Randomization::Alternating}, {"block-two", Randomization::BlockTwo}};

template <class Enum>
const char* name_of(std::initializer_list<std::pair<const char*, Enum>> choices, Enum e) {
    for (const auto& [name, value] : choices) {
        if (value == e) {
            return name;
        }
    }
    return "?";
}

std::optional<DesignSpec> read_design(Object obj) {
    const auto type = obj.text("type", true);
    std::optional<DesignSpec> out;
    if (!type) {
        obj.finish();
        return out;
    }
    if (*type == "prism") {
        PrismSpec p;
        const auto side = pick(obj, "sidedness", kSidedness, true);
        const auto dir = pick(obj, "direction", kDirection);
        p.sidedness = side.value_or(Sidedness::TwoSided);
        p.direction = dir.value_or(Direction::BenefitPositive);
        const bool two = p.sidedness == Sidedness::TwoSided;
        const bool positive = p.direction == Direction::BenefitPositive;
        const bool need_upper = side && (two || positive);
        const bool need_lower = side && (two || !positive);
        p.delta_l2 = obj.number("delta_l2", need_lower).value_or(0.0);
        p.delta_l1 = obj.number("delta_l1", need_lower).value_or(0.0);
        p.delta_g1 = obj.number("delta_g1", need_upper).value_or(0.0);
        p.delta_g2 = obj.number("delta_g2", need_upper).value_or(0.0);
        p.null_value = obj.number("null").value_or(0.0);
        out = p;
    } else if (*type == "rope-only") {
        RopeOnlySpec r;
        const auto rope = obj.numbers("rope", true);
        r.null_value = obj.number("null").value_or(0.0);
        if (rope) {
            if (rope->size() != 2) {
                obj.problems().add(obj.at("rope"), "expected [lo, hi]");
            } else {
                try {
                    r.rope = Interval((*rope)[0], (*rope)[1]);
                    out = r;
                } catch (const InvalidInput& e) {
                    obj.problems().add(obj.at("rope"), e.what());
                }
            }
        }
    } else if (*type == "null-bound-roe") {
        NullBoundRoeSpec r;
        r.delta1 = obj.number("delta1", true).value_or(0.0);
        r.null_value = obj.number("null").value_or(0.0);
        r.direction = pick(obj, "direction", kDirection).value_or(Direction::BenefitPositive);
        out = r;
    } else {
        obj.problems().add(obj.at("type"),
                           "expected one of {prism, rope-only, null-bound-roe}, got \"" + *type + "\"");
    }
    obj.finish();
    return out;
}

MonitoringPlan read_plan(Object obj) {
    MonitoringPlan plan;
    plan.wait = obj.integer("W", true).value_or(plan.wait);
    plan.step = obj.integer("S", true).value_or(plan.step);
    plan.affirm = obj.integer("A", true).value_or(plan.affirm);
    if (const json* n = obj.take("N", true)) {
        if (n->is_string() && n->get<std::string>() == "unrestricted") {
            plan.max_n.reset();
        } else if (n->is_number_integer()) {
            plan.max_n = n->get<int>();
        } else {
            obj.problems().add(obj.at("N"), "expected an integer or \"unrestricted\"");
        }
    }
    plan.affirm_mode = pick(obj, "affirm_mode", kAffirmMode).value_or(plan.affirm_mode);
    plan.interval_level = obj.number("interval_level").value_or(plan.interval_level);
    plan.interval_family = pick(obj, "interval_family", kFamily).value_or(plan.interval_family);
    obj.finish();
    return plan;
}

struct ModelSection {
    OutcomeModel model;
    std::optional<std::filesystem::path> pool;
};

ModelSection read_model(Object obj) {
    ModelSection out;
    const auto kind = obj.text("kind").value_or("normal");
    if (kind == "normal") {
        out.model.kind = NormalOutcomes{obj.number("sd").value_or(1.0)};
    } else if (kind == "bootstrap") {
        if (const auto pool = obj.text("pool", true)) {
            out.pool = *pool;
        }
    } else {
        obj.problems().add(obj.at("kind"), "expected one of {normal, bootstrap}, got \"" + kind + "\"");
    }
    out.model.lag = obj.integer("lag").value_or(0);
    out.model.randomization =
        pick(obj, "randomization", kRandomization).value_or(Randomization::Alternating);
    obj.finish();
    return out;
}

void check_grid(Problems& problems, const std::string& path, const std::vector<int>& values,
                int minimum, bool ascending) {
    for (int v : values) {
        if (v < minimum) {
            problems.add(path, "entries must be >= " + std::to_string(minimum));
            return;
        }
    }
    if (ascending) {
        for (std::size_t k = 1; k < values.size(); ++k) {
            if (values[k] <= values[k - 1]) {
                problems.add(path, "entries must be strictly ascending");
                return;
            }
        }
    }
}

FrequencyGrid read_grid(Object& obj, const MonitoringPlan& plan) {
    FrequencyGrid g;
    g.waits = obj.integers("W").value_or(std::vector<int>{plan.wait});
    g.steps = obj.integers("S").value_or(std::vector<int>{plan.step});
    g.affirms = obj.integers("A").value_or(std::vector<int>{plan.affirm});
    g.caps = obj.integers("N", true).value_or(std::vector<int>{});
    auto& p = obj.problems();
    check_grid(p, obj.at("W"), g.waits, 4, false);
    check_grid(p, obj.at("S"), g.steps, 1, false);
    check_grid(p, obj.at("A"), g.affirms, 0, false);
    check_grid(p, obj.at("N"), g.caps, 1, true);
    for (const auto* list : {&g.waits, &g.steps, &g.affirms, &g.caps}) {
        if (list->empty()) {
            p.add(obj.path(), "grids must not be empty");
            break;
        }
    }
    return g;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

RunSpec parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    Problems problems;
    Object top(&root, "", problems);

    RunSpec spec;
    const auto design = read_design(top.child("design", true));
    spec.oc.plan = read_plan(top.child("plan", true));
    ModelSection model = read_model(top.child("model"));
    spec.oc.model = model.model;

    Object sim = top.child("simulation", true);
    spec.oc.replicates = sim.integer("replicates", true).value_or(1);
    spec.oc.effects = sim.numbers("effects", true).value_or(std::vector<double>{});
    if (const json* seed = sim.take("seed", true)) {
        if (seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
            spec.oc.master_seed = seed->get<std::uint64_t>();
        } else {
            problems.add(sim.at("seed"), "expected a non-negative 64-bit integer");
        }
    }
    spec.oc.workers = sim.integer("workers").value_or(0);
    spec.oc.ceiling = sim.integer("ceiling").value_or(5000);
    sim.finish();
    if (sim.present()) {
        if (spec.oc.replicates < 1) {
            problems.add("simulation.replicates", "must be >= 1");
        }
        if (spec.oc.effects.empty()) {
            problems.add("simulation.effects", "must not be empty");
        }
        if (spec.oc.workers < 0) {
            problems.add("simulation.workers", "must be >= 0");
        }
        if (spec.oc.ceiling < spec.oc.plan.wait) {
            problems.add("simulation.ceiling", "must be >= plan.W");
        }
    }

    if (Object traj = top.child("trajectory"); traj.present()) {
        spec.trajectory = read_grid(traj, spec.oc.plan);
        traj.finish();
    }
    if (Object rev = top.child("reversals"); rev.present()) {
        spec.reversal_lags = rev.integers("lags", true).value_or(std::vector<int>{});
        check_grid(problems, "reversals.lags", spec.reversal_lags, 0, false);
        if (spec.reversal_lags.empty()) {
            problems.add("reversals.lags", "must not be empty");
        }
        rev.finish();
    }
    if (Object cal = top.child("calibrate"); cal.present()) {
        spec.calibrate_waits = cal.integers("W", true).value_or(std::vector<int>{});
        spec.alpha_target = cal.number("alpha_target").value_or(0.05);
        check_grid(problems, "calibrate.W", spec.calibrate_waits, 4, true);
        if (spec.calibrate_waits.empty()) {
            problems.add("calibrate.W", "must not be empty");
        }
        if (!(spec.alpha_target > 0.0 && spec.alpha_target <= 1.0)) {
            problems.add("calibrate.alpha_target", "must lie in (0, 1]");
        }
        cal.finish();
    }
    if (Object sw = top.child("sweep"); sw.present()) {
        spec.sweep = read_grid(sw, spec.oc.plan);
        spec.sweep_reference_theta = sw.number("reference_theta", true);
        sw.finish();
    }
    top.finish();

    if (design) {
        try {
            Design{*design};
            spec.oc.design = *design;
        } catch (const InvalidInput& e) {
            problems.add("design", e.what());
        }
    }
    try {
        spec.oc.plan.validate();
    } catch (const InvalidInput& e) {
        problems.add("plan", e.what());
    }
    if (spec.oc.model.lag < 0) {
        problems.add("model.lag", "must be >= 0");
    }
    if (const auto* normal = std::get_if<NormalOutcomes>(&spec.oc.model.kind)) {
        if (!(normal->sd > 0.0)) {
            problems.add("model.sd", "must be positive");
        }
    }
    const bool needs_null = !spec.trajectory.empty() || !spec.reversal_lags.empty() ||
                            !spec.calibrate_waits.empty() || !spec.sweep.empty();
    if (needs_null && std::find(spec.oc.effects.begin(), spec.oc.effects.end(), 0.0) ==
                          spec.oc.effects.end()) {
        problems.add("simulation.effects",
                     "must contain 0 when trajectory, reversals, calibrate or sweep is configured");
    }
    if (spec.sweep_reference_theta) {
        const auto& e = spec.oc.effects;
        if (std::find(e.begin(), e.end(), *spec.sweep_reference_theta) == e.end()) {
            problems.add("sweep.reference_theta", "must be one of simulation.effects");
        }
    }
    if (!problems.empty()) {
        problems.raise();
    }

    if (model.pool) {
        const auto resolved = model.pool->is_absolute() ? *model.pool : base_dir / *model.pool;
        auto pool = ingest_pool(resolved);
        spec.oc.model.kind =
            BootstrapPool{std::make_shared<const std::vector<double>>(std::move(pool.values))};
        spec.pool_path = *model.pool;
    }
    return spec;
}

RunSpec parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.parent_path());
}

nlohmann::json to_json(const RunSpec& spec) {
    json root;
    const auto& oc = spec.oc;
    json& d = root["design"];
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PrismSpec>) {
                d["type"] = "prism";
                d["sidedness"] = name_of(kSidedness, s.sidedness);
                d["direction"] = name_of(kDirection, s.direction);
                d["delta_l2"] = s.delta_l2;
                d["delta_l1"] = s.delta_l1;
                d["delta_g1"] = s.delta_g1;
                d["delta_g2"] = s.delta_g2;
                d["null"] = s.null_value;
            } else if constexpr (std::is_same_v<T, RopeOnlySpec>) {
                d["type"] = "rope-only";
                d["rope"] = {s.rope.lo(), s.rope.hi()};
                d["null"] = s.null_value;
            } else {
                d["type"] = "null-bound-roe";
                d["null"] = s.null_value;
                d["delta1"] = s.delta1;
                d["direction"] = name_of(kDirection, s.direction);
            }
        },
        oc.design);

    json& p = root["plan"];
    p["W"] = oc.plan.wait;
    p["S"] = oc.plan.step;
    p["A"] = oc.plan.affirm;
    p["N"] = oc.plan.max_n ? json(*oc.plan.max_n) : json("unrestricted");
    p["affirm_mode"] = name_of(kAffirmMode, oc.plan.affirm_mode);
    p["interval_level"] = oc.plan.interval_level;
    p["interval_family"] = name_of(kFamily, oc.plan.interval_family);

    json& m = root["model"];
    if (const auto* normal = std::get_if<NormalOutcomes>(&oc.model.kind)) {
        m["kind"] = "normal";
        m["sd"] = normal->sd;
    } else {
        if (!spec.pool_path) {
            throw InvalidInput("bootstrap model has no pool path to record");
        }
        m["kind"] = "bootstrap";
        m["pool"] = spec.pool_path->string();
    }
    m["lag"] = oc.model.lag;
    m["randomization"] = name_of(kRandomization, oc.model.randomization);

    json& s = root["simulation"];
    s["replicates"] = oc.replicates;
    s["effects"] = oc.effects;
    s["seed"] = oc.master_seed;
    s["workers"] = oc.workers;
    s["ceiling"] = oc.ceiling;

    const auto grid = [](const FrequencyGrid& g) {
        return json{{"W", g.waits}, {"S", g.steps}, {"A", g.affirms}, {"N", g.caps}};
    };
    if (!spec.trajectory.empty()) {
        root["trajectory"] = grid(spec.trajectory);
    }
    if (!spec.reversal_lags.empty()) {
        root["reversals"] = {{"lags", spec.reversal_lags}};
    }
    if (!spec.calibrate_waits.empty()) {
        root["calibrate"] = {{"W", spec.calibrate_waits}, {"alpha_target", spec.alpha_target}};
    }
    if (!spec.sweep.empty()) {
        root["sweep"] = grid(spec.sweep);
        if (spec.sweep_reference_theta) {
            root["sweep"]["reference_theta"] = *spec.sweep_reference_theta;
        }
    }
    return root;
}

OutcomePool ingest_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open outcome pool " + path.string());
    }
    OutcomePool pool;
    std::string line;
    int line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto token = trim(line);
        if (token.empty()) {
            continue;
        }
        const auto value = parse_number(token);
        if (!value) {
            if (!seen_content && line_no == 1) {
                seen_content = true;  // header
                continue;
            }
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": not a finite number: \"" + std::string(token) + "\"");
        }
        seen_content = true;
        pool.values.push_back(*value);
    }
    if (pool.values.empty()) {
        throw DataError("outcome pool " + path.string() + " is empty");
    }
    const double n = static_cast<double>(pool.values.size());
    double sum = 0.0;
    pool.min = pool.values.front();
    pool.max = pool.values.front();
    for (double v : pool.values) {
        sum += v;
        pool.min = std::min(pool.min, v);
        pool.max = std::max(pool.max, v);
    }
    pool.mean = sum / n;
    double ss = 0.0;
    for (double v : pool.values) {
        ss += (v - pool.mean) * (v - pool.mean);
    }
    pool.sd = pool.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return pool;
}

OutcomePool use_pool(RunSpec& spec, const std::filesystem::path& path) {
    auto pool = ingest_pool(path);
    spec.oc.model.kind = BootstrapPool{std::make_shared<const std::vector<double>>(pool.values)};
    spec.pool_path = std::filesystem::absolute(path);
    return pool;
}

}  // namespace seqsgpv
