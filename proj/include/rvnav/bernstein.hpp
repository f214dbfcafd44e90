#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvnav/interval.hpp"
#include "rvnav/polynomial.hpp"

namespace rvnav {

// Sound polynomial over-approximation of ReLU on an interval:
// relu(y) in poly(y) + error_bound for every y in source_interval.
struct ActivationEnclosure {
    UnivariatePoly poly;
    Interval error_bound;
    Interval source_interval;
    int order = 0;
};

namespace detail {

inline constexpr int kCertGridSamples = 1024;

inline double relu(double y) { return y > 0.0 ? y : 0.0; }

// Binomial coefficients for small n.
inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// Bernstein polynomial of f over [lo, hi] with uniformly spaced nodes,
// expanded into the power basis in y.
inline UnivariatePoly bernstein_power_basis(const std::vector<double>& node_values,
                                            double lo, double width) {
    const int n = int(node_values.size()) - 1;
    // coefficients in s where s = (y - lo)/width
    std::vector<double> in_s(std::size_t(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double base = node_values[std::size_t(k)] * binom(n, k);
        if (base == 0.0) continue;
        // s^k (1-s)^(n-k) contributes (-1)^(m-k) C(n-k, m-k) to s^m
        for (int m = k; m <= n; ++m) {
            const double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
            in_s[std::size_t(m)] += base * sign * binom(n - k, m - k);
        }
    }
    // substitute s = alpha + beta*y
    const double beta = 1.0 / width;
    const double alpha = -lo / width;
    std::vector<double> in_y(std::size_t(n) + 1, 0.0);
    std::vector<double> power{1.0};  // (alpha + beta*y)^m, updated incrementally
    for (int m = 0; m <= n; ++m) {
        if (in_s[std::size_t(m)] != 0.0)
            for (std::size_t j = 0; j < power.size(); ++j)
                in_y[j] += in_s[std::size_t(m)] * power[j];
        // multiply power by (alpha + beta*y)
        std::vector<double> next(power.size() + 1, 0.0);
        for (std::size_t j = 0; j < power.size(); ++j) {
            next[j] += alpha * power[j];
            next[j + 1] += beta * power[j];
        }
        power = std::move(next);
    }
    return UnivariatePoly{std::move(in_y)};
}

// Certified upper bound on max |relu - p| over [lo, hi]: dense grid maximum
// plus Lipschitz padding for both functions, plus an evaluation-rounding term.
inline double certify_relu_error(const UnivariatePoly& p, double lo, double hi) {
    const double width = hi - lo;
    const double spacing = width / double(kCertGridSamples - 1);
    double grid_max = 0.0;
    for (int i = 0; i < kCertGridSamples; ++i) {
        const double y = (i == kCertGridSamples - 1) ? hi : lo + spacing * double(i);
        grid_max = std::max(grid_max, std::fabs(relu(y) - p.eval(y)));
    }
    const double lip_relu = 1.0;
    const double lip_poly = p.derivative().eval(Interval{lo, hi}).mag();
    // rounding of the Horner evaluations on the grid
    const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
    double coef_mag = 0.0;
    double scale_pow = 1.0;
    for (double c : p.c) {
        coef_mag += std::fabs(c) * scale_pow;
        scale_pow *= scale;
    }
    const double eval_slack = coef_mag * double(p.c.size() + 1) * 1e-15;
    return next_up(grid_max + (lip_relu + lip_poly) * spacing * 0.5 + eval_slack);
}

}  // namespace detail

// Bernstein-polynomial enclosure of ReLU on `range`. Intervals that do not
// straddle zero get the exact linear or zero enclosure with zero error.
inline ActivationEnclosure bernstein_enclose_relu(const Interval& range, int order) {
    if (order < 1) throw std::invalid_argument("bernstein_enclose_relu: order < 1");
    if (order > 10) throw std::invalid_argument("bernstein_enclose_relu: order > 10");

    ActivationEnclosure enc;
    enc.source_interval = range;
    enc.order = order;

    if (range.lo >= 0.0) {
        enc.poly = UnivariatePoly{{0.0, 1.0}};
        enc.error_bound = Interval{0.0};
        return enc;
    }
    if (range.hi <= 0.0) {
        enc.poly = UnivariatePoly{{0.0}};
        enc.error_bound = Interval{0.0};
        return enc;
    }

    const double width = range.hi - range.lo;
    if (width < 1e-9) {
        // constant enclosure; never divides by the interval width
        const double m = detail::relu(range.mid());
        enc.poly = UnivariatePoly{{m}};
        const double e = next_up(width + 1e-15);
        enc.error_bound = Interval{-e, e};
        return enc;
    }

    std::vector<double> nodes(std::size_t(order) + 1);
    for (int k = 0; k <= order; ++k)
        nodes[std::size_t(k)] =
            detail::relu(range.lo + width * double(k) / double(order));
    enc.poly = detail::bernstein_power_basis(nodes, range.lo, width);
    const double e = detail::certify_relu_error(enc.poly, range.lo, range.hi);
    enc.error_bound = Interval{-e, e};
    return enc;
}

}  // namespace rvnav
