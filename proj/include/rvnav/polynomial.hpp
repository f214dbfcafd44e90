#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rvnav/interval.hpp"

namespace rvnav {

// Symbol order: three normalized initial-state symbols, then local time.
inline constexpr int kSymX = 0;
inline constexpr int kSymY = 1;
inline constexpr int kSymTheta = 2;
inline constexpr int kSymTime = 3;
inline constexpr int kNumSymbols = 4;
inline constexpr int kMaxTotalDegree = 8;

using Exponents = std::array<std::uint8_t, kNumSymbols>;

inline int total_degree(const Exponents& e) {
    return int(e[0]) + int(e[1]) + int(e[2]) + int(e[3]);
}

// Shared index space for monomials of total degree <= kMaxTotalDegree, ordered
// by total degree then lexicographically. A polynomial capped at degree d uses
// the prefix of this list, so coefficients keep their index across caps.
class MonomialTable {
public:
    static const MonomialTable& instance() {
        static const MonomialTable table;
        return table;
    }

    static std::uint32_t pack(const Exponents& e) {
        return std::uint32_t(e[0]) | (std::uint32_t(e[1]) << 8) |
               (std::uint32_t(e[2]) << 16) | (std::uint32_t(e[3]) << 24);
    }

    // Number of monomials with total degree <= cap.
    std::size_t count(int cap) const {
        if (cap < 0) return 0;
        if (cap > kMaxTotalDegree)
            throw std::invalid_argument("MonomialTable: degree cap too large");
        return prefix_[cap];
    }

    const Exponents& exponents(std::size_t index) const { return exps_[index]; }

    // -1 when the monomial exceeds kMaxTotalDegree.
    int index_of(const Exponents& e) const {
        auto it = index_.find(pack(e));
        return it == index_.end() ? -1 : it->second;
    }

private:
    MonomialTable() {
        for (int d = 0; d <= kMaxTotalDegree; ++d) {
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b)
                    for (int c = d - a - b; c >= 0; --c) {
                        const int t = d - a - b - c;
                        Exponents e{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c),
                                    std::uint8_t(t)};
                        index_.emplace(pack(e), int(exps_.size()));
                        exps_.push_back(e);
                    }
            prefix_[d] = exps_.size();
        }
    }

    std::vector<Exponents> exps_;
    std::array<std::size_t, kMaxTotalDegree + 1> prefix_{};
    std::unordered_map<std::uint32_t, int> index_;
};

// Multivariate polynomial over the fixed symbol set, stored densely over all
// monomials up to its degree cap. Coefficients are plain doubles; rounding
// introduced by coefficient arithmetic is accounted for at the Taylor-model
// level via the slack bounds the operations below report.
struct Polynomial {
    int max_degree = 0;
    std::vector<double> coef;  // indexed by MonomialTable, size = count(max_degree)

    Polynomial() : coef(1, 0.0) {}
    explicit Polynomial(int degree_cap)
        : max_degree(degree_cap), coef(MonomialTable::instance().count(degree_cap), 0.0) {
        if (degree_cap < 0 || degree_cap > kMaxTotalDegree)
            throw std::invalid_argument("Polynomial: bad degree cap");
    }

    static Polynomial constant(double c, int degree_cap) {
        Polynomial p(degree_cap);
        p.coef[0] = c;
        return p;
    }

    static Polynomial symbol(int sym, int degree_cap) {
        if (degree_cap < 1) throw std::invalid_argument("Polynomial::symbol: cap < 1");
        Polynomial p(degree_cap);
        Exponents e{0, 0, 0, 0};
        e[std::size_t(sym)] = 1;
        p.coef[std::size_t(MonomialTable::instance().index_of(e))] = 1.0;
        return p;
    }

    double operator[](std::size_t i) const { return coef[i]; }
    double& operator[](std::size_t i) { return coef[i]; }

    double coefficient(const Exponents& e) const {
        const int i = MonomialTable::instance().index_of(e);
        if (i < 0 || std::size_t(i) >= coef.size()) return 0.0;
        return coef[std::size_t(i)];
    }

    bool is_zero() const {
        for (double c : coef)
            if (c != 0.0) return false;
        return true;
    }

    // Exact point evaluation in doubles (test and rendering use only).
    double eval(const std::array<double, kNumSymbols>& z) const {
        const auto& table = MonomialTable::instance();
        double acc = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            if (coef[i] == 0.0) continue;
            const Exponents& e = table.exponents(i);
            double m = coef[i];
            for (int s = 0; s < kNumSymbols; ++s)
                for (int k = 0; k < e[std::size_t(s)]; ++k) m *= z[std::size_t(s)];
            acc += m;
        }
        return acc;
    }
};

namespace detail {

// Per-operation coefficient rounding bound: |fl(z) - z| <= eps * |fl(z)| with
// a margin, plus an absolute floor for subnormals.
inline constexpr double kCoefEps = 2.220446049250313e-16;  // 2^-52
inline constexpr double kCoefFloor = 1e-300;

inline double round_slack(double stored) {
    return std::fabs(stored) * kCoefEps + kCoefFloor;
}

}  // namespace detail

// slack accumulates a bound on the total coefficient rounding error. Callers
// fold it into a remainder; this is valid because every symbol range in the
// Taylor-model domain has magnitude <= 1 (enforced at TM construction).
inline Polynomial poly_add(const Polynomial& a, const Polynomial& b, double& slack) {
    const Polynomial& big = a.max_degree >= b.max_degree ? a : b;
    const Polynomial& small = a.max_degree >= b.max_degree ? b : a;
    Polynomial r = big;
    for (std::size_t i = 0; i < small.coef.size(); ++i) {
        if (small.coef[i] == 0.0) continue;
        r.coef[i] += small.coef[i];
        slack += detail::round_slack(r.coef[i]);
    }
    return r;
}

inline Polynomial poly_scale(const Polynomial& a, double s, double& slack) {
    Polynomial r = a;
    for (double& c : r.coef) {
        if (c == 0.0) continue;
        c *= s;
        slack += detail::round_slack(c);
    }
    return r;
}

inline void poly_axpy(Polynomial& acc, double w, const Polynomial& p, double& slack) {
    if (w == 0.0) return;
    for (std::size_t i = 0; i < p.coef.size(); ++i) {
        if (p.coef[i] == 0.0) continue;
        const double prod = w * p.coef[i];
        acc.coef[i] += prod;
        slack += detail::round_slack(prod) + detail::round_slack(acc.coef[i]);
    }
}

// Univariate polynomial in power basis; used for activation enclosures and
// truncated trig series.
struct UnivariatePoly {
    std::vector<double> c;  // c[0] + c[1]*y + ...

    UnivariatePoly() = default;
    explicit UnivariatePoly(std::vector<double> coeffs) : c(std::move(coeffs)) {}

    int degree() const { return c.empty() ? 0 : int(c.size()) - 1; }

    double eval(double y) const {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * y + c[i];
        return acc;
    }

    Interval eval(const Interval& y) const {
        Interval acc{0.0};
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * y + Interval{c[i]};
        return acc;
    }

    UnivariatePoly derivative() const {
        if (c.size() <= 1) return UnivariatePoly{{0.0}};
        std::vector<double> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * double(i);
        return UnivariatePoly{std::move(d)};
    }
};

}  // namespace rvnav
