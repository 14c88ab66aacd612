#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "seqsgpv/regions.hpp"

namespace seqsgpv {

enum class Sidedness { OneSided, TwoSided };
enum class Direction { BenefitPositive, BenefitNegative };

/// Pre-specified regions around a point null.
///
/// Two-sided: delta_l2 <= delta_l1 < null < delta_g1 <= delta_g2, with
///   ROPE = [delta_l1, delta_g1] and ROME = (-inf, delta_l2] U [delta_g2, inf).
/// One-sided, benefit positive: null < delta_g1 <= delta_g2, with
///   ROWPE = (-inf, delta_g1] and ROME = [delta_g2, inf).
/// One-sided, benefit negative: delta_l2 <= delta_l1 < null, with
///   ROWPE = [delta_l1, inf) and ROME = (-inf, delta_l2].
/// Bounds that the chosen sidedness/direction does not use are ignored.
struct PrismSpec {
    Sidedness sidedness = Sidedness::TwoSided;
    Direction direction = Direction::BenefitPositive;
    double delta_l2 = 0.0;
    double delta_l1 = 0.0;
    double delta_g1 = 0.0;
    double delta_g2 = 0.0;
    double null_value = 0.0;

    friend bool operator==(const PrismSpec&, const PrismSpec&) = default;
};

/// ROPE-only monitoring: stop when the ROPE is ruled out or supported.
struct RopeOnlySpec {
    Interval rope{-1.0, 1.0};
    double null_value = 0.0;

    friend bool operator==(const RopeOnlySpec&, const RopeOnlySpec&) = default;
};

/// Region of equivalence [null, delta1] bounded by the null (benefit
/// positive; mirrored for benefit negative).
struct NullBoundRoeSpec {
    double null_value = 0.0;
    double delta1 = 0.0;
    Direction direction = Direction::BenefitPositive;

    friend bool operator==(const NullBoundRoeSpec&, const NullBoundRoeSpec&) = default;
};

using DesignSpec = std::variant<PrismSpec, RopeOnlySpec, NullBoundRoeSpec>;

/// Monitoring alert raised from a single interval. The two "ruled out"
/// alerts are independent bits; Both carries both of them.
enum class AlertStatus : unsigned {
    None = 0,
    NonRope = 1,   ///< null side ruled out (ROPE / ROWPE / non-beneficial)
    NonRome = 2,   ///< meaningful side ruled out
    Both = 3,
    RopeSupported = 4,
};

constexpr unsigned alert_bits(AlertStatus a) noexcept { return static_cast<unsigned>(a); }

/// True when `current` carries any alert held by `pending` (Both affirms
/// either single alert and vice versa).
constexpr bool affirms(AlertStatus pending, AlertStatus current) noexcept {
    return (alert_bits(pending) & alert_bits(current)) != 0;
}

constexpr AlertStatus common_alert(AlertStatus a, AlertStatus b) noexcept {
    return static_cast<AlertStatus>(alert_bits(a) & alert_bits(b));
}

enum class ConclusionCategory {
    Inconclusive,
    RuledOutMeaningful,
    RuledOutNullEquivalent,
    MildEffect,  ///< both null-equivalent and meaningful effects ruled out
};

struct Conclusion {
    ConclusionCategory category = ConclusionCategory::Inconclusive;
    bool reject_null = false;

    friend bool operator==(const Conclusion&, const Conclusion&) = default;
};

struct HypothesisRegions {
    Region null_side;
    Region meaningful_side;
};

/// A validated design with its monitored regions precomputed. Immutable.
class Design {
public:
    /// Throws InvalidInput on any ordering violation.
    explicit Design(DesignSpec spec);

    const DesignSpec& spec() const noexcept { return spec_; }
    const HypothesisRegions& regions() const noexcept { return regions_; }
    Sidedness sidedness() const noexcept;
    double null_value() const noexcept;

    AlertStatus evaluate_alert(const Interval& i) const;
    Conclusion classify_conclusion(const Interval& i) const;
    bool rejects_null(const Interval& i) const noexcept;

    /// Short token for reports, e.g. "prism-one-sided".
    std::string label() const;

private:
    DesignSpec spec_;
    HypothesisRegions regions_;
};

/// The two monitored regions for a design:
///   PRISM          -> (ROPE or ROWPE, ROME)
///   ROPE only      -> (ROPE, ROPE)
///   null-bound ROE -> ([null, inf), (-inf, delta1]) for benefit positive.
HypothesisRegions hypothesis_regions(const DesignSpec& d);

AlertStatus evaluate_alert(const Design& d, const Interval& i);
Conclusion classify_conclusion(const Design& d, const Interval& i);

std::string_view to_string(AlertStatus a) noexcept;
std::string_view to_string(ConclusionCategory c) noexcept;
std::string_view to_string(Sidedness s) noexcept;
std::string_view to_string(Direction d) noexcept;

}  // namespace seqsgpv
