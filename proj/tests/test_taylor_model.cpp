#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "rvnav/rng.hpp"
#include "rvnav/taylor_model.hpp"

using namespace rvnav;

namespace {

std::array<double, 4> random_domain_point(Rng& rng, const Domain& dom) {
    std::array<double, 4> z{};
    for (int s = 0; s < kNumSymbols; ++s)
        z[std::size_t(s)] = uniform(rng, dom.sym[std::size_t(s)].lo, dom.sym[std::size_t(s)].hi);
    return z;
}

TaylorModel random_tm(Rng& rng, const Domain& dom, int degree) {
    Polynomial p(degree);
    for (std::size_t i = 0; i < p.coef.size(); ++i)
        if (uniform01(rng) < 0.6) p.coef[i] = uniform(rng, -2.0, 2.0);
    const double r = uniform(rng, 0.0, 0.3);
    const double c = uniform(rng, -0.1, 0.1);
    return TaylorModel{std::move(p), Interval{c - r, c + r}, dom};
}

double poly_value(const TaylorModel& tm, const std::array<double, 4>& z) {
    return tm.poly.eval(z);
}

// numerical time integral of the polynomial part at fixed spatial point
double integrate_poly_numeric(const TaylorModel& tm, std::array<double, 4> z, double t) {
    constexpr int kSteps = 2000;
    double acc = 0.0;
    const double h = t / kSteps;
    for (int i = 0; i < kSteps; ++i) {
        auto za = z, zm = z, zb = z;
        za[kSymTime] = h * i;
        zm[kSymTime] = h * (i + 0.5);
        zb[kSymTime] = h * (i + 1);
        acc += h / 6.0 * (poly_value(tm, za) + 4.0 * poly_value(tm, zm) + poly_value(tm, zb));
    }
    return acc;
}

bool encloses_value(const TaylorModel& tm, const std::array<double, 4>& z, double value,
                    double pad = 1e-9) {
    const Interval box = widen(tm.rem, pad);
    const double p = poly_value(tm, z);
    return box.contains(value - p);
}

}  // namespace

TEST_CASE("tm_add examples") {
    const Domain dom = Domain::spatial();
    const TaylorModel x = TaylorModel::symbol(kSymX, 2, dom);
    const TaylorModel one = TaylorModel::constant(1.0, 2, dom);

    const TaylorModel sum = tm_add(x, one);
    Exponents ex{1, 0, 0, 0};
    REQUIRE(sum.poly.coefficient(ex) == 1.0);
    REQUIRE(sum.poly.coefficient(Exponents{0, 0, 0, 0}) == 1.0);
    REQUIRE(sum.rem.mag() < 1e-14);

    // additive identity
    Rng rng(5);
    TaylorModel p = random_tm(rng, dom, 2);
    const TaylorModel zero = TaylorModel::constant(0.0, 2, dom);
    const TaylorModel same = tm_add(p, zero);
    for (std::size_t i = 0; i < p.poly.coef.size(); ++i)
        REQUIRE(same.poly.coef[i] == p.poly.coef[i]);
    REQUIRE(same.rem.contains(p.rem));

    // remainder adds like intervals
    TaylorModel xr{Polynomial::symbol(kSymX, 2), Interval{-0.1, 0.1}, dom};
    const TaylorModel twice = tm_add(xr, xr);
    REQUIRE(twice.poly.coefficient(ex) == 2.0);
    const Interval oracle = Interval{-0.1, 0.1} + Interval{-0.1, 0.1};
    REQUIRE(twice.rem.contains(Interval{-0.2, 0.2}));
    REQUIRE(oracle.contains(Interval{-0.2, 0.2}));
}

TEST_CASE("tm_add rejects mismatched domains") {
    const TaylorModel a = TaylorModel::constant(1.0, 2, Domain::spatial());
    const TaylorModel b = TaylorModel::constant(1.0, 2, Domain::with_time(0.02));
    REQUIRE_THROWS_AS(tm_add(a, b), std::invalid_argument);
}

TEST_CASE("tm_mul examples") {
    const Domain dom = Domain::spatial();
    const TaylorModel x = TaylorModel::symbol(kSymX, 2, dom);
    const TaylorModel one_plus = tm_add_const(x, 1.0);
    const TaylorModel one_minus = tm_add_const(tm_neg(x), 1.0);

    // exact fit within degree 2
    const TaylorModel exact = tm_mul(one_plus, one_minus, 2);
    REQUIRE(exact.poly.coefficient(Exponents{0, 0, 0, 0}) == 1.0);
    REQUIRE(exact.poly.coefficient(Exponents{2, 0, 0, 0}) == -1.0);
    REQUIRE(exact.rem.mag() < 1e-14);

    // truncation to degree 1 spills -x^2, whose range over [-1,1] is [-1,0]
    const TaylorModel trunc = tm_mul(one_plus, one_minus, 1);
    REQUIRE(trunc.poly.coefficient(Exponents{0, 0, 0, 0}) == 1.0);
    REQUIRE(trunc.rem.contains(Interval{-1.0, 0.0}));
    REQUIRE(trunc.rem.width() < 1.1);  // even powers map to [0,1], not [-1,1]

    // zero absorbs
    const TaylorModel z = tm_mul(one_plus, TaylorModel::constant(0.0, 2, dom), 2);
    REQUIRE(z.poly.is_zero());
    REQUIRE(z.rem.mag() < 1e-14);
}

TEST_CASE("tm_range examples") {
    const Domain dom = Domain::spatial();
    const TaylorModel x = TaylorModel::symbol(kSymX, 2, dom);
    REQUIRE(tm_range(x).contains(Interval{-1.0, 1.0}));

    const TaylorModel x2 = tm_mul(x, x, 2);
    const Interval r2 = tm_range(x2);
    REQUIRE(r2.contains(Interval{0.0, 1.0}));
    REQUIRE(r2.lo >= -1e-12);  // even-power monomials evaluate to [0,1]

    // interval-evaluation oracle for 1 + 2x with remainder [-0.1, 0.1]
    TaylorModel affine = tm_add_const(tm_scale(x, 2.0), 1.0);
    affine.rem = Interval{-0.1, 0.1};
    const Interval r = tm_range(affine);
    const Interval oracle = Interval{1.0} + Interval{2.0} * Interval{-1.0, 1.0} +
                            Interval{-0.1, 0.1};
    REQUIRE(r.contains(Interval{-1.1, 3.1}));
    REQUIRE(oracle.contains(Interval{-1.1, 3.1}));
    REQUIRE(r.width() <= oracle.width() + 1e-12);
}

TEST_CASE("tm_integrate_time examples") {
    const double h = 0.02;
    const Domain dom = Domain::with_time(h);

    const TaylorModel one = TaylorModel::constant(1.0, 2, dom);
    const TaylorModel t = tm_integrate_time(one, h);
    REQUIRE(t.poly.coefficient(Exponents{0, 0, 0, 1}) == 1.0);
    REQUIRE(t.rem.mag() < 1e-14);

    // remainder scales by [0, h]
    TaylorModel noisy = TaylorModel::constant(0.0, 2, dom);
    noisy.rem = Interval{-1.0, 1.0};
    const TaylorModel scaled = tm_integrate_time(noisy, h);
    REQUIRE(scaled.rem.contains(Interval{-0.02, 0.02}));
    REQUIRE(scaled.rem.width() < 0.05);

    // ∫ t dt = t^2/2 when the cap allows it
    const TaylorModel t2 = tm_integrate_time(t, h);
    REQUIRE(t2.poly.coefficient(Exponents{0, 0, 0, 2}) == 0.5);
}

TEST_CASE("tm_compose_poly examples") {
    const Domain dom = Domain::spatial();
    const TaylorModel x = TaylorModel::symbol(kSymX, 2, dom);

    // identity
    const TaylorModel same = tm_compose_poly(UnivariatePoly{{0.0, 1.0}}, x, 2);
    REQUIRE(same.poly.coefficient(Exponents{1, 0, 0, 0}) == 1.0);
    REQUIRE(same.rem.mag() < 1e-14);

    // y^2
    const TaylorModel sq = tm_compose_poly(UnivariatePoly{{0.0, 0.0, 1.0}}, x, 2);
    REQUIRE(sq.poly.coefficient(Exponents{2, 0, 0, 0}) == 1.0);

    // (y+1)^2 / 4
    const TaylorModel b = tm_compose_poly(UnivariatePoly{{0.25, 0.5, 0.25}}, x, 2);
    REQUIRE(b.poly.coefficient(Exponents{0, 0, 0, 0}) == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(b.poly.coefficient(Exponents{1, 0, 0, 0}) == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(b.poly.coefficient(Exponents{2, 0, 0, 0}) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("enclosure soundness by sampling across all operations") {
    Rng rng(2024);
    const Domain dom = Domain::with_time(0.02);
    for (int trial = 0; trial < 1000; ++trial) {
        const TaylorModel a = random_tm(rng, dom, 2);
        const TaylorModel b = random_tm(rng, dom, 2);
        const auto z = random_domain_point(rng, dom);
        const double ra = uniform(rng, a.rem.lo, a.rem.hi);
        const double rb = uniform(rng, b.rem.lo, b.rem.hi);
        const double ga = poly_value(a, z) + ra;
        const double gb = poly_value(b, z) + rb;

        REQUIRE(encloses_value(tm_add(a, b), z, ga + gb));
        REQUIRE(encloses_value(tm_mul(a, b, 2), z, ga * gb, 1e-7));

        // integrate: representative = poly + constant remainder draw
        const TaylorModel integ = tm_integrate_time(a, 0.02);
        const double t = z[kSymTime];
        const double exact = integrate_poly_numeric(a, z, t) + ra * t;
        REQUIRE(encloses_value(integ, z, exact, 1e-7));

        // compose with a random cubic
        UnivariatePoly u{{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1),
                          uniform(rng, -1, 1)}};
        const TaylorModel comp = tm_compose_poly(u, a, 2);
        REQUIRE(encloses_value(comp, z, u.eval(ga), 1e-6));
    }
}

TEST_CASE("degree cap is never exceeded") {
    Rng rng(11);
    const Domain dom = Domain::with_time(0.02);
    const auto& table = MonomialTable::instance();
    for (int trial = 0; trial < 200; ++trial) {
        const TaylorModel a = random_tm(rng, dom, 3);
        const TaylorModel b = random_tm(rng, dom, 3);
        for (int cap = 1; cap <= 3; ++cap) {
            const TaylorModel m = tm_mul(a, b, cap);
            REQUIRE(m.poly.max_degree == cap);
            for (std::size_t i = 0; i < m.poly.coef.size(); ++i)
                if (m.poly.coef[i] != 0.0)
                    REQUIRE(total_degree(table.exponents(i)) <= cap);
        }
    }
}

TEST_CASE("widening an input remainder never shrinks the output remainder") {
    Rng rng(31337);
    const Domain dom = Domain::with_time(0.02);
    for (int trial = 0; trial < 300; ++trial) {
        const TaylorModel a = random_tm(rng, dom, 2);
        const TaylorModel b = random_tm(rng, dom, 2);
        TaylorModel a_wide = a;
        a_wide.rem = widen(a.rem, uniform(rng, 0.0, 0.5));

        REQUIRE(tm_add(a_wide, b).rem.contains(tm_add(a, b).rem));
        REQUIRE(tm_mul(a_wide, b, 2).rem.contains(tm_mul(a, b, 2).rem));
        REQUIRE(tm_integrate_time(a_wide, 0.02).rem.contains(tm_integrate_time(a, 0.02).rem));
        UnivariatePoly u{{0.3, -0.7, 0.2}};
        REQUIRE(tm_compose_poly(u, a_wide, 2).rem.contains(tm_compose_poly(u, a, 2).rem));
    }
}
