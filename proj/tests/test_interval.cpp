#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rvnav/interval.hpp"
#include "rvnav/rng.hpp"

using namespace rvnav;

namespace {

Interval random_interval(Rng& rng, double span = 10.0) {
    const double a = uniform(rng, -span, span);
    const double b = uniform(rng, -span, span);
    return Interval{std::min(a, b), std::max(a, b)};
}

// Dense-sampling oracle: the samples are true image members, so any sound
// enclosure must contain their hull. With Lipschitz constant 1 the padded
// hull also bounds the image from outside, which verifies expected values.
struct SampledImage {
    Interval inner;  // hull of samples; subset of the true image
    Interval outer;  // padded hull; superset of the true image
};

SampledImage sampled_image(double (*f)(double), const Interval& x) {
    constexpr int kSamples = 20000;
    const double step = x.width() / (kSamples - 1);
    double lo = f(x.lo), hi = f(x.lo);
    for (int i = 1; i < kSamples; ++i) {
        const double v = f(x.lo + step * i);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return SampledImage{Interval{lo, hi}, Interval{lo - step, hi + step}};
}

}  // namespace

TEST_CASE("next_up/next_down agree with nextafter") {
    Rng rng(1234);
    for (int i = 0; i < 20000; ++i) {
        const double x = uniform(rng, -1e6, 1e6) * std::pow(10.0, uniform(rng, -12, 12));
        REQUIRE(next_up(x) == std::nextafter(x, std::numeric_limits<double>::infinity()));
        REQUIRE(next_down(x) == std::nextafter(x, -std::numeric_limits<double>::infinity()));
    }
    REQUIRE(next_up(0.0) > 0.0);
    REQUIRE(next_down(0.0) < 0.0);
    REQUIRE(next_up(-0.0) > 0.0);
}

TEST_CASE("interval construction rejects inverted bounds") {
    REQUIRE_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
    REQUIRE_NOTHROW(Interval(0.0, 0.0));
}

TEST_CASE("interval addition examples") {
    const Interval r = Interval{1, 2} + Interval{3, 4};
    REQUIRE(r.lo <= 4.0);
    REQUIRE(r.hi >= 6.0);

    const Interval id = Interval{0, 0} + Interval{-2.5, 7.5};
    REQUIRE(id.contains(Interval{-2.5, 7.5}));

    const Interval sym = Interval{-1, 1} + Interval{-1, 1};
    REQUIRE(sym.contains(Interval{-2, 2}));
}

TEST_CASE("interval multiplication examples") {
    REQUIRE((Interval{-1, 2} * Interval{3, 4}).contains(Interval{-4, 8}));
    REQUIRE((Interval{0, 0} * Interval{-123, 456}).contains(0.0));
    REQUIRE((Interval{2, 3} * Interval{2, 3}).contains(Interval{4, 9}));
}

TEST_CASE("trig examples") {
    REQUIRE(iv_cos(Interval{0, 0}).contains(1.0));
    // the padded sampling oracle confirms the expected image [0,1] / [-1,1]
    const SampledImage sin_img = sampled_image(std::sin, Interval{0.0, M_PI});
    REQUIRE(sin_img.outer.contains(Interval{0.0, 1.0}));
    REQUIRE(iv_sin(Interval{0.0, M_PI}).contains(Interval{0.0, 1.0}));
    REQUIRE(iv_cos(Interval{0.0, M_PI}).contains(Interval{-1.0, 1.0}));
    // wide interval short-circuits to [-1, 1]
    REQUIRE(iv_sin(Interval{0.0, 10.0}).contains(Interval{-1.0, 1.0}));
}

TEST_CASE("trig image containment against the sampling oracle") {
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
        const Interval x = random_interval(rng, 8.0);
        REQUIRE(iv_sin(x).contains(sampled_image(std::sin, x).inner));
        REQUIRE(iv_cos(x).contains(sampled_image(std::cos, x).inner));
        REQUIRE(iv_sin(x).lo >= -1.0 - 1e-12);
        REQUIRE(iv_sin(x).hi <= 1.0 + 1e-12);
    }
}

TEST_CASE("soundness by sampling: point results lie in interval results") {
    Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
        const Interval a = random_interval(rng);
        const Interval b = random_interval(rng);
        const double x = uniform(rng, a.lo, a.hi);
        const double y = uniform(rng, b.lo, b.hi);
        REQUIRE((a + b).contains(x + y));
        REQUIRE((a - b).contains(x - y));
        REQUIRE((a * b).contains(x * y));
        REQUIRE(iv_sin(a).contains(std::sin(x)));
        REQUIRE(iv_cos(a).contains(std::cos(x)));
    }
}

TEST_CASE("inclusion monotonicity on random nested intervals") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Interval a2 = random_interval(rng);
        const Interval b2 = random_interval(rng);
        // nested sub-intervals
        const double al = uniform(rng, a2.lo, a2.hi), ah = uniform(rng, al, a2.hi);
        const double bl = uniform(rng, b2.lo, b2.hi), bh = uniform(rng, bl, b2.hi);
        const Interval a1{al, ah}, b1{bl, bh};
        REQUIRE((a2 + b2).contains(a1 + b1));
        REQUIRE((a2 - b2).contains(a1 - b1));
        REQUIRE((a2 * b2).contains(a1 * b1));
        REQUIRE(iv_sin(a2).contains(iv_sin(a1)));
        REQUIRE(iv_cos(a2).contains(iv_cos(a1)));
    }
}

TEST_CASE("iv_pow handles even and odd powers") {
    const Interval sym{-1.0, 1.0};
    const Interval even = iv_pow(sym, 2);
    REQUIRE(even.lo >= -1e-15);
    REQUIRE(even.contains(Interval{0.0, 1.0}));
    const Interval odd = iv_pow(sym, 3);
    REQUIRE(odd.contains(Interval{-1.0, 1.0}));

    Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        const Interval a = random_interval(rng, 3.0);
        const int k = int(uniform_index(rng, 6)) + 1;
        const double x = uniform(rng, a.lo, a.hi);
        REQUIRE(iv_pow(a, k).contains(std::pow(x, k)));
    }
}
