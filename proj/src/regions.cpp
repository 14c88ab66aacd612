#include "seqsgpv/regions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "seqsgpv/error.hpp"

namespace seqsgpv {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi)) {
        throw InvalidInput("interval end is NaN");
    }
    if (lo > hi) {
        std::ostringstream msg;
        msg << "malformed interval: lo " << lo << " > hi " << hi;
        throw InvalidInput(msg.str());
    }
    if (lo == kInf || hi == -kInf) {
        throw InvalidInput("interval lies entirely at infinity");
    }
}

bool Interval::bounded() const noexcept {
    return std::isfinite(lo_) && std::isfinite(hi_);
}

Interval Interval::scaled(double k) const {
    if (!(k > 0)) {
        throw InvalidInput("scale factor must be positive");
    }
    return {lo_ * k, hi_ * k};
}

std::ostream& operator<<(std::ostream& os, const Interval& i) {
    return os << '[' << i.lo() << ", " << i.hi() << ']';
}

Region normalize(std::span<const Interval> parts) {
    return Region(parts);
}

Region::Region(std::initializer_list<Interval> parts)
    : Region(std::span<const Interval>(parts.begin(), parts.size())) {}

Region::Region(std::span<const Interval> parts) {
    std::vector<Interval> sorted(parts.begin(), parts.end());
    std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) {
        return a.lo() < b.lo() || (a.lo() == b.lo() && a.hi() < b.hi());
    });
    for (const auto& p : sorted) {
        // Closed parts: touching ends merge.
        if (!parts_.empty() && p.lo() <= parts_.back().hi()) {
            auto& last = parts_.back();
            last = Interval(last.lo(), std::max(last.hi(), p.hi()));
        } else {
            parts_.push_back(p);
        }
    }
}

double Region::length() const noexcept {
    double total = 0.0;
    for (const auto& p : parts_) {
        total += p.length();
    }
    return total;
}

bool Region::contains(double x) const noexcept {
    return std::any_of(parts_.begin(), parts_.end(),
                       [x](const Interval& p) { return p.contains(x); });
}

Region Region::shifted(double c) const {
    std::vector<Interval> moved;
    moved.reserve(parts_.size());
    for (const auto& p : parts_) {
        moved.push_back(p.shifted(c));
    }
    return Region(moved);
}

Region Region::scaled(double k) const {
    std::vector<Interval> moved;
    moved.reserve(parts_.size());
    for (const auto& p : parts_) {
        moved.push_back(p.scaled(k));
    }
    return Region(moved);
}

std::ostream& operator<<(std::ostream& os, const Region& r) {
    os << '{';
    bool first = true;
    for (const auto& p : r.parts()) {
        if (!first) {
            os << " U ";
        }
        os << p;
        first = false;
    }
    return os << '}';
}

double overlap_length(const Interval& i, const Region& r) noexcept {
    double total = 0.0;
    for (const auto& p : r.parts()) {
        // Neither end can be the "wrong" infinity, so the difference is never NaN.
        const double lo = std::max(i.lo(), p.lo());
        const double hi = std::min(i.hi(), p.hi());
        if (hi > lo) {
            total += hi - lo;
        }
    }
    return total;
}

double sgpv(const Interval& i, const Region& r) {
    if (!i.bounded()) {
        throw InvalidInput("sgpv: inferential interval must be bounded");
    }
    const double width = i.length();
    if (!(width > 0)) {
        throw InvalidInput("sgpv: inferential interval has zero length");
    }
    const double region_length = r.length();
    if (!(region_length > 0)) {
        throw InvalidInput("sgpv: hypothesis region has zero length");
    }
    const double correction =
        std::isinf(region_length) ? 1.0 : std::max(width / (2.0 * region_length), 1.0);
    const double p = overlap_length(i, r) / width * correction;
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace seqsgpv
