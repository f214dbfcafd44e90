#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rvnav {

// One step toward +inf / -inf in the double grid. Bit-level equivalent of
// std::nextafter, kept branch-light because these sit under every interval op.
inline double next_up(double x) {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) return x;
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    std::uint64_t b = std::bit_cast<std::uint64_t>(x);
    b = (b >> 63) ? b - 1 : b + 1;
    return std::bit_cast<double>(b);
}

inline double next_down(double x) { return -next_up(-x); }

// Closed real interval [lo, hi]. Arithmetic results are outward-rounded by
// one ulp per endpoint, so the exact real result set is always contained.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    explicit Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h))
            throw std::invalid_argument("Interval: inverted bounds [" +
                                        std::to_string(l) + ", " + std::to_string(h) + "]");
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    // Upper bound on the distance from mid() to either endpoint.
    double rad() const {
        const double m = mid();
        return std::max(next_up(hi - m), next_up(m - lo));
    }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline Interval operator-(const Interval& a) { return Interval{-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval{next_down(a.lo + b.lo), next_up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval{next_down(a.lo - b.hi), next_up(a.hi - b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return Interval{next_down(std::min({p1, p2, p3, p4})),
                    next_up(std::max({p1, p2, p3, p4}))};
}

inline Interval operator*(const Interval& a, double s) { return a * Interval{s}; }
inline Interval operator*(double s, const Interval& a) { return a * Interval{s}; }
inline Interval operator+(const Interval& a, double s) { return a + Interval{s}; }

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval{std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval hull(const Interval& a, double v) {
    return Interval{std::min(a.lo, v), std::max(a.hi, v)};
}

// Intersection of two enclosures of the same nonempty set. Both inputs must
// contain that set, so the result is never inverted.
inline Interval intersect_enclosures(const Interval& a, const Interval& b) {
    const double l = std::max(a.lo, b.lo);
    const double h = std::min(a.hi, b.hi);
    if (l > h) return a.width() <= b.width() ? a : b;
    return Interval{l, h};
}

inline Interval widen(const Interval& a, double abs_pad) {
    return Interval{a.lo - abs_pad, a.hi + abs_pad};
}

// a^k with the usual sign analysis: even powers of a zero-straddling interval
// start at 0, not at -mag^k.
inline Interval iv_pow(const Interval& a, int k) {
    if (k < 0) throw std::invalid_argument("iv_pow: negative exponent");
    if (k == 0) return Interval{1.0};
    if (k == 1) return a;
    if (k % 2 == 1) {
        Interval r = a;
        for (int i = 1; i < k; ++i) r = r * a;
        return r;
    }
    // even power: image is |a|^k over the magnitude range
    const bool straddles = a.lo <= 0.0 && a.hi >= 0.0;
    const double abs_lo = straddles ? 0.0 : std::min(std::fabs(a.lo), std::fabs(a.hi));
    const double abs_hi = a.mag();
    double lo = 1.0, hi = 1.0;
    for (int i = 0; i < k; ++i) {
        lo = next_down(lo * abs_lo);
        hi = next_up(hi * abs_hi);
    }
    return Interval{std::max(lo, 0.0), hi};
}

namespace detail {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Conservative "does [lo,hi] possibly contain offset + k*period for integer k".
inline bool contains_critical(double lo, double hi, double offset, double period) {
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         (std::max(std::fabs(lo), std::fabs(hi)) + std::fabs(offset) + period);
    const long long k0 = static_cast<long long>(std::floor((lo - offset) / period)) - 1;
    const long long k1 = static_cast<long long>(std::ceil((hi - offset) / period)) + 1;
    for (long long k = k0; k <= k1; ++k) {
        const double c = offset + static_cast<double>(k) * period;
        if (c >= lo - slack && c <= hi + slack) return true;
    }
    return false;
}

// Shared sin/cos image computation. max_offset/min_offset locate the critical
// points: f attains +1 at max_offset + 2pi*k and -1 at min_offset + 2pi*k.
template <typename F>
Interval trig_image(const Interval& a, F f, double max_offset, double min_offset) {
    if (a.width() >= kTwoPi) return Interval{-1.0, 1.0};
    const double pad = 8.0 * std::numeric_limits<double>::epsilon();
    double lo = std::min(f(a.lo), f(a.hi)) - pad;
    double hi = std::max(f(a.lo), f(a.hi)) + pad;
    if (contains_critical(a.lo, a.hi, max_offset, kTwoPi)) hi = 1.0;
    if (contains_critical(a.lo, a.hi, min_offset, kTwoPi)) lo = -1.0;
    // the true image never leaves [-1, 1]
    return Interval{std::max(lo, -1.0), std::min(hi, 1.0)};
}

}  // namespace detail

inline Interval iv_sin(const Interval& a) {
    return detail::trig_image(a, [](double x) { return std::sin(x); },
                              1.5707963267948966, -1.5707963267948966);
}

inline Interval iv_cos(const Interval& a) {
    return detail::trig_image(a, [](double x) { return std::cos(x); },
                              0.0, 3.1415926535897932);
}

}  // namespace rvnav
