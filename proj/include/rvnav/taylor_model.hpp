#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvnav/interval.hpp"
#include "rvnav/polynomial.hpp"

namespace rvnav {

// Domain of the four symbols. The three state symbols are pinned to [-1, 1];
// the time symbol covers [0, h] with h <= 1 so that every monomial range has
// magnitude <= 1 (the coefficient-slack bound in polynomial.hpp relies on it).
struct Domain {
    std::array<Interval, kNumSymbols> sym;

    static Domain spatial() {
        Domain d;
        d.sym = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}, Interval{-1.0, 1.0},
                 Interval{0.0, 0.0}};
        return d;
    }

    static Domain with_time(double h) {
        if (!(h >= 0.0) || h > 1.0)
            throw std::invalid_argument("Domain: time width must lie in [0, 1]");
        Domain d = spatial();
        d.sym[kSymTime] = Interval{0.0, h};
        return d;
    }

    double time_width() const { return sym[kSymTime].hi; }

    bool operator==(const Domain& o) const {
        for (int s = 0; s < kNumSymbols; ++s)
            if (sym[std::size_t(s)].lo != o.sym[std::size_t(s)].lo ||
                sym[std::size_t(s)].hi != o.sym[std::size_t(s)].hi)
                return false;
        return true;
    }
};

// Range of one monomial over the domain.
inline Interval monomial_range(const Exponents& e, const Domain& dom) {
    Interval r{1.0};
    for (int s = 0; s < kNumSymbols; ++s)
        if (e[std::size_t(s)] != 0) r = r * iv_pow(dom.sym[std::size_t(s)], e[std::size_t(s)]);
    return r;
}

// Polynomial with a guaranteed remainder: the represented function g satisfies
// g(z) in poly(z) + rem for every z in the domain.
struct TaylorModel {
    Polynomial poly;
    Interval rem;
    Domain dom = Domain::spatial();

    TaylorModel() = default;
    TaylorModel(Polynomial p, Interval r, Domain d)
        : poly(std::move(p)), rem(r), dom(d) {}

    static TaylorModel constant(double c, int degree_cap, const Domain& d) {
        return TaylorModel{Polynomial::constant(c, degree_cap), Interval{0.0}, d};
    }

    static TaylorModel symbol(int sym, int degree_cap, const Domain& d) {
        return TaylorModel{Polynomial::symbol(sym, degree_cap), Interval{0.0}, d};
    }
};

struct TaylorModelVector {
    std::vector<TaylorModel> comps;

    const Domain& domain() const {
        if (comps.empty()) throw std::logic_error("TaylorModelVector: empty");
        return comps.front().dom;
    }
    std::size_t size() const { return comps.size(); }
    TaylorModel& operator[](std::size_t i) { return comps[i]; }
    const TaylorModel& operator[](std::size_t i) const { return comps[i]; }
};

namespace detail {

inline void require_same_domain(const TaylorModel& a, const TaylorModel& b) {
    if (!(a.dom == b.dom)) throw std::invalid_argument("TaylorModel: domain mismatch");
}

inline Interval slack_interval(double slack) { return Interval{-slack, slack}; }

}  // namespace detail

// Sound but not tight: per-monomial range times coefficient, plus remainder.
inline Interval tm_range(const TaylorModel& a) {
    const auto& table = MonomialTable::instance();
    Interval acc{0.0};
    for (std::size_t i = 0; i < a.poly.coef.size(); ++i) {
        const double c = a.poly.coef[i];
        if (c == 0.0) continue;
        acc = acc + Interval{c} * monomial_range(table.exponents(i), a.dom);
    }
    return acc + a.rem;
}

inline TaylorModel tm_add(const TaylorModel& a, const TaylorModel& b) {
    detail::require_same_domain(a, b);
    double slack = 0.0;
    Polynomial p = poly_add(a.poly, b.poly, slack);
    return TaylorModel{std::move(p), a.rem + b.rem + detail::slack_interval(slack), a.dom};
}

inline TaylorModel tm_neg(const TaylorModel& a) {
    TaylorModel r = a;
    for (double& c : r.poly.coef) c = -c;
    r.rem = -a.rem;
    return r;
}

inline TaylorModel tm_sub(const TaylorModel& a, const TaylorModel& b) {
    return tm_add(a, tm_neg(b));
}

inline TaylorModel tm_scale(const TaylorModel& a, double s) {
    double slack = 0.0;
    Polynomial p = poly_scale(a.poly, s, slack);
    return TaylorModel{std::move(p), a.rem * s + detail::slack_interval(slack), a.dom};
}

inline TaylorModel tm_add_const(const TaylorModel& a, double c) {
    TaylorModel r = a;
    r.poly.coef[0] += c;
    r.rem = r.rem + detail::slack_interval(detail::round_slack(r.poly.coef[0]));
    return r;
}

inline TaylorModel tm_add_interval(const TaylorModel& a, const Interval& iv) {
    TaylorModel r = a;
    r.rem = r.rem + iv;
    return r;
}

// Product. Exact on polynomial terms up to max_degree; higher-degree products
// are range-evaluated over the domain and folded into the remainder, as are
// the poly*rem and rem*rem cross terms.
inline TaylorModel tm_mul(const TaylorModel& a, const TaylorModel& b, int max_degree) {
    detail::require_same_domain(a, b);
    const auto& table = MonomialTable::instance();
    Polynomial p(max_degree);
    Interval spill{0.0};
    double slack = 0.0;

    for (std::size_t i = 0; i < a.poly.coef.size(); ++i) {
        const double ca = a.poly.coef[i];
        if (ca == 0.0) continue;
        const Exponents& ea = table.exponents(i);
        for (std::size_t j = 0; j < b.poly.coef.size(); ++j) {
            const double cb = b.poly.coef[j];
            if (cb == 0.0) continue;
            const Exponents& eb = table.exponents(j);
            Exponents e{std::uint8_t(ea[0] + eb[0]), std::uint8_t(ea[1] + eb[1]),
                        std::uint8_t(ea[2] + eb[2]), std::uint8_t(ea[3] + eb[3])};
            if (total_degree(e) <= max_degree) {
                const double prod = ca * cb;
                const int idx = table.index_of(e);
                p.coef[std::size_t(idx)] += prod;
                slack += detail::round_slack(prod) +
                         detail::round_slack(p.coef[std::size_t(idx)]);
            } else {
                spill = spill + (Interval{ca} * Interval{cb}) * monomial_range(e, a.dom);
            }
        }
    }

    // cross terms through the remainders, bounded by polynomial ranges
    Interval rem = spill + detail::slack_interval(slack);
    if (!(b.rem.lo == 0.0 && b.rem.hi == 0.0)) {
        TaylorModel a_poly_only{a.poly, Interval{0.0}, a.dom};
        rem = rem + tm_range(a_poly_only) * b.rem;
    }
    if (!(a.rem.lo == 0.0 && a.rem.hi == 0.0)) {
        TaylorModel b_poly_only{b.poly, Interval{0.0}, b.dom};
        rem = rem + a.rem * tm_range(b_poly_only) + a.rem * b.rem;
    }
    return TaylorModel{std::move(p), rem, a.dom};
}

// Antiderivative in the local time symbol, valid on [0, h] where h is the
// domain's time width. The remainder scales by [0, h]; degree spill is
// range-evaluated like in tm_mul.
inline TaylorModel tm_integrate_time(const TaylorModel& a, double h) {
    if (std::fabs(h - a.dom.time_width()) > 0.0)
        throw std::invalid_argument("tm_integrate_time: h does not match domain");
    const auto& table = MonomialTable::instance();
    const int cap = a.poly.max_degree;
    Polynomial p(cap);
    Interval spill{0.0};
    double slack = 0.0;

    for (std::size_t i = 0; i < a.poly.coef.size(); ++i) {
        const double c = a.poly.coef[i];
        if (c == 0.0) continue;
        Exponents e = table.exponents(i);
        const int et = e[kSymTime];
        e[kSymTime] = std::uint8_t(et + 1);
        const double divided = c / double(et + 1);
        if (total_degree(e) <= cap) {
            const int idx = table.index_of(e);
            p.coef[std::size_t(idx)] += divided;
            slack += detail::round_slack(divided) +
                     detail::round_slack(p.coef[std::size_t(idx)]);
        } else {
            spill = spill + (Interval{c} * Interval{1.0 / double(et + 1)}) *
                                monomial_range(e, a.dom);
        }
    }

    const Interval time_iv{0.0, h};
    Interval rem = a.rem * time_iv + spill + detail::slack_interval(slack);
    return TaylorModel{std::move(p), rem, a.dom};
}

// Horner evaluation of a univariate polynomial at a Taylor model.
inline TaylorModel tm_compose_poly(const UnivariatePoly& u, const TaylorModel& a,
                                   int max_degree) {
    if (u.c.empty()) return TaylorModel::constant(0.0, max_degree, a.dom);
    TaylorModel acc = TaylorModel::constant(u.c.back(), max_degree, a.dom);
    for (std::size_t i = u.c.size() - 1; i-- > 0;) {
        acc = tm_mul(acc, a, max_degree);
        acc = tm_add_const(acc, u.c[i]);
    }
    return acc;
}

// Evaluate at a fixed local time, collapsing t-monomials into their spatial
// counterparts. The result lives on the zero-width time domain.
inline TaylorModel tm_eval_time(const TaylorModel& a, double t) {
    if (t < 0.0 || t > a.dom.time_width() + 1e-15)
        throw std::invalid_argument("tm_eval_time: t outside domain");
    const auto& table = MonomialTable::instance();
    Polynomial p(a.poly.max_degree);
    double slack = 0.0;
    for (std::size_t i = 0; i < a.poly.coef.size(); ++i) {
        const double c = a.poly.coef[i];
        if (c == 0.0) continue;
        Exponents e = table.exponents(i);
        double v = c;
        for (int k = 0; k < e[kSymTime]; ++k) {
            v *= t;
            slack += detail::round_slack(v);
        }
        e[kSymTime] = 0;
        const int idx = table.index_of(e);
        p.coef[std::size_t(idx)] += v;
        slack += detail::round_slack(p.coef[std::size_t(idx)]);
    }
    return TaylorModel{std::move(p), a.rem + detail::slack_interval(slack),
                       Domain::spatial()};
}

// Affine re-parameterization onto fresh normalized symbols: component i
// becomes mid_i + rad_i * s_i with zero remainder, covering the old range.
// Keeps symbol count fixed across chained verification steps.
inline TaylorModelVector tm_recenter_box(const TaylorModelVector& v, int degree_cap) {
    TaylorModelVector out;
    const Domain dom = Domain::spatial();
    out.comps.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Interval r = tm_range(v[i]);
        const double mid = r.mid();
        const double rad = r.rad();
        Polynomial p(degree_cap);
        p.coef[0] = mid;
        Exponents e{0, 0, 0, 0};
        e[i % 3] = 1;
        p.coef[std::size_t(MonomialTable::instance().index_of(e))] = rad;
        out.comps.push_back(TaylorModel{std::move(p), Interval{0.0}, dom});
    }
    return out;
}

// Initial enclosure from a center point and per-dimension half-widths.
inline TaylorModelVector tm_from_box(const std::array<double, 3>& center,
                                     const std::array<double, 3>& half_width,
                                     int degree_cap) {
    TaylorModelVector out;
    const Domain dom = Domain::spatial();
    for (std::size_t i = 0; i < 3; ++i) {
        Polynomial p(degree_cap);
        p.coef[0] = center[i];
        Exponents e{0, 0, 0, 0};
        e[i] = 1;
        p.coef[std::size_t(MonomialTable::instance().index_of(e))] = half_width[i];
        out.comps.push_back(TaylorModel{std::move(p), Interval{0.0}, dom});
    }
    return out;
}

}  // namespace rvnav
