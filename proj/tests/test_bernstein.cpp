#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rvnav/bernstein.hpp"
#include "rvnav/rng.hpp"

using namespace rvnav;

namespace {

double relu(double y) { return y > 0.0 ? y : 0.0; }

// Dense max of |relu - p| — a lower bound on the true sup error.
double sampled_max_error(const UnivariatePoly& p, const Interval& range) {
    constexpr int kSamples = 100000;
    double m = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double y = range.lo + range.width() * double(i) / double(kSamples - 1);
        m = std::max(m, std::fabs(relu(y) - p.eval(y)));
    }
    return m;
}

}  // namespace

TEST_CASE("one-sided intervals give exact enclosures") {
    const ActivationEnclosure pos = bernstein_enclose_relu(Interval{2.0, 5.0}, 3);
    REQUIRE(pos.poly.c.size() == 2);
    REQUIRE(pos.poly.c[0] == 0.0);
    REQUIRE(pos.poly.c[1] == 1.0);
    REQUIRE(pos.error_bound.lo == 0.0);
    REQUIRE(pos.error_bound.hi == 0.0);

    const ActivationEnclosure neg = bernstein_enclose_relu(Interval{-3.0, 0.0}, 1);
    REQUIRE(neg.poly.eval(-1.5) == 0.0);
    REQUIRE(neg.error_bound.lo == 0.0);
    REQUIRE(neg.error_bound.hi == 0.0);
}

TEST_CASE("order-2 enclosure on [-1,1] matches the closed form") {
    const ActivationEnclosure enc = bernstein_enclose_relu(Interval{-1.0, 1.0}, 2);
    // Bernstein nodes {-1, 0, 1} give (y+1)^2 / 4
    REQUIRE(enc.poly.c.size() == 3);
    REQUIRE(enc.poly.c[0] == Catch::Approx(0.25).margin(1e-14));
    REQUIRE(enc.poly.c[1] == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(enc.poly.c[2] == Catch::Approx(0.25).margin(1e-14));

    // the true max error of (y+1)^2/4 against relu is exactly 0.25 at y = 0:
    // for y <= 0 the error is (y+1)^2/4, maximized at 0; for y > 0 it is
    // (y-1)^2/4, approaching 0.25 from below.
    REQUIRE(sampled_max_error(enc.poly, enc.source_interval) <= 0.25 + 1e-9);
    const double e = enc.error_bound.hi;
    REQUIRE(e >= 0.25);
    REQUIRE(e <= 0.26);
}

TEST_CASE("rejects bad arguments") {
    REQUIRE_THROWS_AS(bernstein_enclose_relu(Interval{-1.0, 1.0}, 0), std::invalid_argument);
}

TEST_CASE("soundness over random ranges, orders, and points") {
    Rng rng(555);
    for (int trial = 0; trial < 10000; ++trial) {
        const double a = uniform(rng, -4.0, 4.0);
        const double b = uniform(rng, -4.0, 4.0);
        const Interval range{std::min(a, b), std::max(a, b)};
        const int order = 1 + int(uniform_index(rng, 5));
        const ActivationEnclosure enc = bernstein_enclose_relu(range, order);
        const double y = uniform(rng, range.lo, range.hi);
        const double err = relu(y) - enc.poly.eval(y);
        REQUIRE(enc.error_bound.lo - 1e-12 <= err);
        REQUIRE(err <= enc.error_bound.hi + 1e-12);
    }
}

TEST_CASE("degenerate width falls back to a constant enclosure") {
    const Interval tiny{-1e-10, 1e-10};
    const ActivationEnclosure enc = bernstein_enclose_relu(tiny, 2);
    REQUIRE(enc.poly.c.size() == 1);
    for (double y : {tiny.lo, 0.0, tiny.hi}) {
        const double err = relu(y) - enc.poly.eval(y);
        REQUIRE(enc.error_bound.contains(err));
    }
}

TEST_CASE("certified error shrinks weakly as the order grows") {
    double prev = std::numeric_limits<double>::infinity();
    for (int order = 1; order <= 5; ++order) {
        const ActivationEnclosure enc = bernstein_enclose_relu(Interval{-1.0, 1.0}, order);
        const double e = enc.error_bound.hi;
        REQUIRE(e <= prev + 1e-9);
        prev = e;
    }
}
