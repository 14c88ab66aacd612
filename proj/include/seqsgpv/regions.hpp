#pragma once

#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace seqsgpv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval on the extended real line. Either end may be infinite
/// (lo = -inf, hi = +inf); infinities are IEEE infinities, never sentinels.
class Interval {
public:
    /// Throws InvalidInput when lo > hi, an end is NaN, or the interval
    /// sits entirely at one infinity.
    Interval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    /// hi - lo, possibly +inf.
    double length() const noexcept { return hi_ - lo_; }
    bool bounded() const noexcept;
    bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& other) const noexcept {
        return lo_ <= other.lo_ && other.hi_ <= hi_;
    }

    Interval shifted(double c) const { return {lo_ + c, hi_ + c}; }
    /// Scale by k > 0.
    Interval scaled(double k) const;

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_;
    double hi_;
};

std::ostream& operator<<(std::ostream& os, const Interval& i);

/// Finite union of closed intervals kept in canonical form: sorted by lower
/// end, pairwise disjoint, and no two parts touching.
class Region {
public:
    Region() = default;
    Region(std::initializer_list<Interval> parts);
    explicit Region(std::span<const Interval> parts);

    std::span<const Interval> parts() const noexcept { return parts_; }
    bool empty() const noexcept { return parts_.empty(); }
    double length() const noexcept;
    bool contains(double x) const noexcept;

    Region shifted(double c) const;
    Region scaled(double k) const;

    friend bool operator==(const Region&, const Region&) = default;

private:
    std::vector<Interval> parts_;
};

std::ostream& operator<<(std::ostream& os, const Region& r);

/// Canonical disjoint sorted union covering the same point set as `parts`.
Region normalize(std::span<const Interval> parts);

/// |i ∩ r|, exact; +inf when both share an unbounded side.
double overlap_length(const Interval& i, const Region& r) noexcept;

/// Second-generation p-value of interval `i` against hypothesis region `r`:
///
///     p = |i ∩ r| / |i| * max(|i| / (2|r|), 1)
///
/// The correction factor is exactly 1 when |r| is infinite. `i` must be
/// bounded with positive length and `r` must have positive length;
/// otherwise InvalidInput is thrown.
double sgpv(const Interval& i, const Region& r);

}  // namespace seqsgpv
