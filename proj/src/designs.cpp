#include "seqsgpv/designs.hpp"

#include <cmath>

#include "seqsgpv/error.hpp"

namespace seqsgpv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidInput(what);
    }
}

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

void validate(const PrismSpec& p) {
    if (p.sidedness == Sidedness::TwoSided) {
        require(all_finite({p.delta_l2, p.delta_l1, p.delta_g1, p.delta_g2, p.null_value}),
                "PRISM bounds must be finite");
        require(p.delta_l2 <= p.delta_l1 && p.delta_l1 < p.null_value &&
                    p.null_value < p.delta_g1 && p.delta_g1 <= p.delta_g2,
                "PRISM ordering violated: need delta_l2 <= delta_l1 < null < delta_g1 <= delta_g2");
    } else if (p.direction == Direction::BenefitPositive) {
        require(all_finite({p.delta_g1, p.delta_g2, p.null_value}), "PRISM bounds must be finite");
        require(p.null_value < p.delta_g1 && p.delta_g1 <= p.delta_g2,
                "PRISM ordering violated: need null < delta_g1 <= delta_g2");
    } else {
        require(all_finite({p.delta_l2, p.delta_l1, p.null_value}), "PRISM bounds must be finite");
        require(p.delta_l2 <= p.delta_l1 && p.delta_l1 < p.null_value,
                "PRISM ordering violated: need delta_l2 <= delta_l1 < null");
    }
}

void validate(const RopeOnlySpec& r) {
    require(r.rope.bounded() && std::isfinite(r.null_value), "ROPE must be bounded");
    require(r.rope.lo() < r.null_value && r.null_value < r.rope.hi(),
            "ROPE must contain the null in its interior");
}

void validate(const NullBoundRoeSpec& r) {
    require(all_finite({r.null_value, r.delta1}), "ROE bounds must be finite");
    if (r.direction == Direction::BenefitPositive) {
        require(r.null_value < r.delta1, "ROE ordering violated: need null < delta1");
    } else {
        require(r.delta1 < r.null_value, "ROE ordering violated: need delta1 < null");
    }
}

}  // namespace

HypothesisRegions hypothesis_regions(const DesignSpec& d) {
    return std::visit(
        Overloaded{
            [](const PrismSpec& p) -> HypothesisRegions {
                validate(p);
                if (p.sidedness == Sidedness::TwoSided) {
                    return {Region{{p.delta_l1, p.delta_g1}},
                            Region{{-kInf, p.delta_l2}, {p.delta_g2, kInf}}};
                }
                if (p.direction == Direction::BenefitPositive) {
                    return {Region{{-kInf, p.delta_g1}}, Region{{p.delta_g2, kInf}}};
                }
                return {Region{{p.delta_l1, kInf}}, Region{{-kInf, p.delta_l2}}};
            },
            [](const RopeOnlySpec& r) -> HypothesisRegions {
                validate(r);
                return {Region{r.rope}, Region{r.rope}};
            },
            [](const NullBoundRoeSpec& r) -> HypothesisRegions {
                validate(r);
                if (r.direction == Direction::BenefitPositive) {
                    return {Region{{r.null_value, kInf}}, Region{{-kInf, r.delta1}}};
                }
                return {Region{{-kInf, r.null_value}}, Region{{r.delta1, kInf}}};
            },
        },
        d);
}

Design::Design(DesignSpec spec) : spec_(std::move(spec)), regions_(hypothesis_regions(spec_)) {}

Sidedness Design::sidedness() const noexcept {
    return std::visit(Overloaded{
                          [](const PrismSpec& p) { return p.sidedness; },
                          [](const RopeOnlySpec&) { return Sidedness::TwoSided; },
                          [](const NullBoundRoeSpec&) { return Sidedness::OneSided; },
                      },
                      spec_);
}

double Design::null_value() const noexcept {
    return std::visit([](const auto& s) { return s.null_value; }, spec_);
}

AlertStatus Design::evaluate_alert(const Interval& i) const {
    return std::visit(
        Overloaded{
            [&](const PrismSpec&) {
                unsigned bits = 0;
                if (sgpv(i, regions_.null_side) == 0.0) {
                    bits |= alert_bits(AlertStatus::NonRope);
                }
                if (sgpv(i, regions_.meaningful_side) == 0.0) {
                    bits |= alert_bits(AlertStatus::NonRome);
                }
                return static_cast<AlertStatus>(bits);
            },
            [&](const RopeOnlySpec&) {
                const double p = sgpv(i, regions_.null_side);
                if (p == 0.0) {
                    return AlertStatus::NonRope;
                }
                return p == 1.0 ? AlertStatus::RopeSupported : AlertStatus::None;
            },
            [&](const NullBoundRoeSpec&) {
                // Stop once the interval sits wholly inside the beneficial
                // hypothesis (non-beneficial effects ruled out) or wholly inside
                // the non-meaningful one (meaningful effects ruled out). Both
                // regions are unbounded, so sgpv == 1 is exact containment.
                unsigned bits = 0;
                if (sgpv(i, regions_.null_side) == 1.0) {
                    bits |= alert_bits(AlertStatus::NonRope);
                }
                if (sgpv(i, regions_.meaningful_side) == 1.0) {
                    bits |= alert_bits(AlertStatus::NonRome);
                }
                return static_cast<AlertStatus>(bits);
            },
        },
        spec_);
}

bool Design::rejects_null(const Interval& i) const noexcept {
    const double null = null_value();
    if (sidedness() == Sidedness::TwoSided) {
        return i.lo() > null || i.hi() < null;
    }
    const Direction dir = std::visit(Overloaded{
                                         [](const PrismSpec& p) { return p.direction; },
                                         [](const RopeOnlySpec&) { return Direction::BenefitPositive; },
                                         [](const NullBoundRoeSpec& r) { return r.direction; },
                                     },
                                     spec_);
    return dir == Direction::BenefitPositive ? i.lo() > null : i.hi() < null;
}

Conclusion Design::classify_conclusion(const Interval& i) const {
    Conclusion c;
    switch (evaluate_alert(i)) {
        case AlertStatus::None:
            c.category = ConclusionCategory::Inconclusive;
            break;
        case AlertStatus::NonRope:
            c.category = ConclusionCategory::RuledOutNullEquivalent;
            break;
        case AlertStatus::NonRome:
        case AlertStatus::RopeSupported:
            c.category = ConclusionCategory::RuledOutMeaningful;
            break;
        case AlertStatus::Both:
            c.category = ConclusionCategory::MildEffect;
            break;
    }
    c.reject_null = rejects_null(i);
    return c;
}

std::string Design::label() const {
    return std::visit(Overloaded{
                          [](const PrismSpec& p) {
                              return std::string(p.sidedness == Sidedness::TwoSided
                                                     ? "prism-two-sided"
                                                     : "prism-one-sided");
                          },
                          [](const RopeOnlySpec&) { return std::string("rope-only"); },
                          [](const NullBoundRoeSpec&) { return std::string("null-bound-roe"); },
                      },
                      spec_);
}

AlertStatus evaluate_alert(const Design& d, const Interval& i) { return d.evaluate_alert(i); }

Conclusion classify_conclusion(const Design& d, const Interval& i) {
    return d.classify_conclusion(i);
}

std::string_view to_string(AlertStatus a) noexcept {
    switch (a) {
        case AlertStatus::None: return "none";
        case AlertStatus::NonRope: return "non-rope";
        case AlertStatus::NonRome: return "non-rome";
        case AlertStatus::Both: return "both";
        case AlertStatus::RopeSupported: return "rope-supported";
    }
    return "?";
}

std::string_view to_string(ConclusionCategory c) noexcept {
    switch (c) {
        case ConclusionCategory::Inconclusive: return "inconclusive";
        case ConclusionCategory::RuledOutMeaningful: return "ruled-out-meaningful";
        case ConclusionCategory::RuledOutNullEquivalent: return "ruled-out-null-equivalent";
        case ConclusionCategory::MildEffect: return "mild-effect";
    }
    return "?";
}

std::string_view to_string(Sidedness s) noexcept {
    return s == Sidedness::TwoSided ? "two-sided" : "one-sided";
}

std::string_view to_string(Direction d) noexcept {
    return d == Direction::BenefitPositive ? "benefit-positive" : "benefit-negative";
}

}  // namespace seqsgpv
