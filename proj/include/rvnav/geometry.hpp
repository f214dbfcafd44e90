#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "rvnav/interval.hpp"

namespace rvnav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 rot90ccw() const { return {-y, x}; }
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

// Smallest positive ray parameter t with origin + t*dir on the circle, if any.
inline std::optional<double> ray_circle_intersection(const Vec2& origin, const Vec2& dir,
                                                     const Circle& c) {
    const Vec2 oc = origin - c.center;
    const double a = dir.dot(dir);
    const double b = 2.0 * oc.dot(dir);
    const double q = oc.dot(oc) - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * q;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    const double t1 = (-b - root) / (2.0 * a);
    const double t2 = (-b + root) / (2.0 * a);
    if (t1 >= 0.0) return t1;
    if (t2 >= 0.0) return t2;
    return std::nullopt;
}

// Ray against segment [p0, p1]; returns the ray parameter of the hit.
inline std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                                      const Vec2& p0, const Vec2& p1) {
    const Vec2 e = p1 - p0;
    const double denom = dir.x * (-e.y) - dir.y * (-e.x);
    if (std::fabs(denom) < 1e-14) return std::nullopt;
    const Vec2 rhs = p0 - origin;
    const double t = (rhs.x * (-e.y) - rhs.y * (-e.x)) / denom;
    const double s = (dir.x * rhs.y - dir.y * rhs.x) / denom;
    if (t < 0.0 || s < -1e-12 || s > 1.0 + 1e-12) return std::nullopt;
    return t;
}

// Conservative test: does the axis-aligned box touch the disc? Errs toward
// "intersects" so it is safe to use as a collision predicate.
inline bool box_intersects_circle(const Interval& xs, const Interval& ys, const Vec2& center,
                                  double radius) {
    const double dx = std::max({xs.lo - center.x, 0.0, center.x - xs.hi});
    const double dy = std::max({ys.lo - center.y, 0.0, center.y - ys.hi});
    return dx * dx + dy * dy <= radius * radius * (1.0 + 1e-12) + 1e-15;
}

namespace detail {

inline Circle circle_two_points(const Vec2& a, const Vec2& b) {
    const Vec2 c{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    return Circle{c, std::max((a - c).norm(), (b - c).norm())};
}

inline std::optional<Circle> circumcircle(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (std::fabs(d) < 1e-14) return std::nullopt;
    const double a2 = a.dot(a), b2 = b.dot(b), c2 = c.dot(c);
    const Vec2 center{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                      (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    const double r = std::max({(a - center).norm(), (b - center).norm(), (c - center).norm()});
    return Circle{center, r};
}

inline bool in_circle(const Vec2& p, const Circle& c, double eps = 1e-10) {
    return (p - c.center).norm() <= c.radius + eps;
}

inline Circle trivial_circle(const std::vector<Vec2>& boundary) {
    switch (boundary.size()) {
        case 0: return Circle{{0.0, 0.0}, 0.0};
        case 1: return Circle{boundary[0], 0.0};
        case 2: return circle_two_points(boundary[0], boundary[1]);
        default: {
            auto c = circumcircle(boundary[0], boundary[1], boundary[2]);
            if (c) return *c;
            // collinear support set: fall back to the widest pair
            Circle best = circle_two_points(boundary[0], boundary[1]);
            for (std::size_t i = 0; i < boundary.size(); ++i)
                for (std::size_t j = i + 1; j < boundary.size(); ++j) {
                    Circle cand = circle_two_points(boundary[i], boundary[j]);
                    if (cand.radius > best.radius) best = cand;
                }
            return best;
        }
    }
}

inline Circle welzl(std::vector<Vec2>& pts, std::size_t n, std::vector<Vec2>& boundary) {
    if (n == 0 || boundary.size() == 3) return trivial_circle(boundary);
    const Vec2 p = pts[n - 1];
    Circle c = welzl(pts, n - 1, boundary);
    if (in_circle(p, c)) return c;
    boundary.push_back(p);
    c = welzl(pts, n - 1, boundary);
    boundary.pop_back();
    return c;
}

}  // namespace detail

// Welzl's minimal enclosing circle. Deterministic (no shuffle); the clusters
// this sees are small enough that the worst case does not matter.
inline Circle min_enclosing_circle(const std::vector<Vec2>& points) {
    std::vector<Vec2> pts = points;
    std::vector<Vec2> boundary;
    return detail::welzl(pts, pts.size(), boundary);
}

// Algebraic least-squares circle fit (Kasa): minimizes the residuals of
// x^2 + y^2 = 2ax + 2by + c. Exact for points sampled from a true circle.
inline std::optional<Circle> fit_circle(const std::vector<Vec2>& pts) {
    if (pts.size() < 3) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
    for (const Vec2& p : pts) {
        const double z = p.dot(p);
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        syy += p.y * p.y;
        sxy += p.x * p.y;
        sxz += p.x * z;
        syz += p.y * z;
        sz += z;
    }
    const double n = double(pts.size());
    // normal equations for [2a, 2b, c]
    const double m[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
    const double rhs[3] = {sxz, syz, sz};
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::fabs(det) < 1e-12) return std::nullopt;
    auto solve = [&](int col) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i][j] = (j == col) ? rhs[i] : m[i][j];
        return (t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])) /
               det;
    };
    const double two_a = solve(0);
    const double two_b = solve(1);
    const double c = solve(2);
    const Vec2 center{0.5 * two_a, 0.5 * two_b};
    const double r2 = c + center.dot(center);
    if (!(r2 > 0.0) || !std::isfinite(r2)) return std::nullopt;
    return Circle{center, std::sqrt(r2)};
}

}  // namespace rvnav
