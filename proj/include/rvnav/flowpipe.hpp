#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvnav/interval.hpp"
#include "rvnav/taylor_model.hpp"
#include "rvnav/unicycle.hpp"

namespace rvnav {

// Raised when Picard iteration cannot certify a remainder; callers treat it
// as an unsafe-by-failure verdict.
struct FlowpipeFailure : std::runtime_error {
    explicit FlowpipeFailure(const std::string& what) : std::runtime_error(what) {}
};

struct FlowSegment {
    double t_begin = 0.0;  // seconds from the start of the control period chain
    double t_end = 0.0;
    TaylorModelVector tm;  // valid on local time [0, t_end - t_begin]
    Interval x_box;        // cached axis-aligned ranges over the whole segment
    Interval y_box;
    Interval theta_box;
};

struct Flowpipe {
    std::vector<FlowSegment> segments;
};

struct FlowStepSettings {
    int tm_degree = 2;
    int picard_iters = 4;
    int max_inflations = 20;
};

namespace detail {

// Truncated series for cos/sin of a Taylor model: expand around the midpoint
// of the argument range with the Lagrange remainder (all derivatives of
// sin/cos are bounded by 1) plus the coefficient-rounding residue.
inline TaylorModel tm_trig(const TaylorModel& theta, int degree, bool is_cos) {
    const Interval th_range = tm_range(theta);
    const double center = th_range.mid();
    const TaylorModel u = tm_add_const(theta, -center);
    const Interval u_range = tm_range(u);

    const double c = std::cos(center);
    const double s = std::sin(center);
    // derivative cycle at the center: cos -> [c, -s, -c, s], sin -> [s, c, -s, -c]
    const double cycle[4] = {is_cos ? c : s, is_cos ? -s : c, is_cos ? -c : -s,
                             is_cos ? s : -c};

    std::vector<double> coeffs(std::size_t(degree) + 1);
    Interval coeff_residue{0.0};
    double factorial = 1.0;
    for (int j = 0; j <= degree; ++j) {
        if (j > 0) factorial *= double(j);
        const double cj = cycle[j % 4] / factorial;
        coeffs[std::size_t(j)] = cj;
        // libm trig plus the division are good to a few ulp
        const double err = 4.0 * std::fabs(cj) * detail::kCoefEps + 1e-300;
        coeff_residue = coeff_residue + Interval{-err, err} * iv_pow(u_range, j);
    }

    TaylorModel out = tm_compose_poly(UnivariatePoly{std::move(coeffs)}, u, degree);

    double lagrange = 1.0;
    for (int j = 1; j <= degree + 1; ++j)
        lagrange = next_up(next_up(lagrange * u_range.mag()) / double(j));
    out.rem = out.rem + Interval{-lagrange, lagrange} + coeff_residue;
    return out;
}

inline TaylorModel interval_constant_tm(const Interval& v, int degree, const Domain& dom) {
    const double m = v.mid();
    TaylorModel tm = TaylorModel::constant(m, degree, dom);
    tm.rem = v - Interval{m};
    return tm;
}

// One application of the Picard operator to candidate state TMs.
inline TaylorModelVector picard_apply(const TaylorModelVector& init,
                                      const TaylorModelVector& cand, const Interval& v,
                                      const Interval& omega, double h, int degree) {
    const Domain& dom = cand.domain();
    const TaylorModel v_tm = interval_constant_tm(v, degree, dom);
    const TaylorModel w_tm = interval_constant_tm(omega, degree, dom);

    const TaylorModel cos_th = tm_trig(cand[2], degree, true);
    const TaylorModel sin_th = tm_trig(cand[2], degree, false);

    TaylorModelVector out;
    out.comps.push_back(tm_add(init[0], tm_integrate_time(tm_mul(v_tm, cos_th, degree), h)));
    out.comps.push_back(tm_add(init[1], tm_integrate_time(tm_mul(v_tm, sin_th, degree), h)));
    out.comps.push_back(tm_add(init[2], tm_integrate_time(w_tm, h)));
    return out;
}

// Containment of one TM enclosure in another over the shared domain:
// range(a.poly - b.poly) + a.rem must fit inside b.rem.
inline bool tm_encloses(const TaylorModel& outer, const TaylorModel& inner) {
    double slack = 0.0;
    Polynomial diff = poly_add(inner.poly, poly_scale(outer.poly, -1.0, slack), slack);
    const TaylorModel d{std::move(diff), detail::slack_interval(slack), inner.dom};
    const Interval drift = tm_range(d) + inner.rem;
    return outer.rem.contains(drift);
}

}  // namespace detail

// Taylor-model enclosure of all unicycle trajectories over local time [0, h]
// from the input enclosure, for any constant control drawn from the given
// intervals. Picard iteration builds the candidate; one more application must
// map it into itself, else the remainder is inflated geometrically.
inline TaylorModelVector picard_flow_step(const TaylorModelVector& state, const Interval& v,
                                          const Interval& omega, double h,
                                          const FlowStepSettings& settings) {
    if (!(h > 0.0)) throw std::invalid_argument("picard_flow_step: h must be positive");
    if (state.size() != 3) throw std::invalid_argument("picard_flow_step: state must be 3-d");

    const Domain dom = Domain::with_time(h);
    TaylorModelVector init;
    for (const TaylorModel& c : state.comps) {
        TaylorModel tm = c;
        if (tm.dom.time_width() != 0.0)
            throw std::invalid_argument("picard_flow_step: state must be time-free");
        tm.dom = dom;
        init.comps.push_back(std::move(tm));
    }

    TaylorModelVector cand = init;
    for (int it = 0; it < settings.picard_iters; ++it)
        cand = detail::picard_apply(init, cand, v, omega, h, settings.tm_degree);

    double inflation = 1.0;
    for (int attempt = 0; attempt < settings.max_inflations; ++attempt) {
        TaylorModelVector once = detail::picard_apply(init, cand, v, omega, h,
                                                      settings.tm_degree);
        bool contained = true;
        for (std::size_t i = 0; i < 3; ++i)
            contained = contained && detail::tm_encloses(cand[i], once[i]);
        if (contained) return once;

        inflation *= 2.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const Interval r = hull(cand[i].rem, once[i].rem);
            const double grow = r.rad() * inflation + 1e-15 * inflation;
            cand[i].rem = Interval{r.lo - grow, r.hi + grow};
        }
    }
    throw FlowpipeFailure("picard_flow_step: no contraction after max inflations");
}

// Chains picard_flow_step over one control period and re-centers the final
// state onto fresh normalized symbols so symbol complexity stays bounded
// across verification steps.
struct ControlPeriodFlow {
    std::vector<FlowSegment> segments;
    TaylorModelVector end_state;
};

inline ControlPeriodFlow flow_control_period(const TaylorModelVector& state,
                                             const Interval& v, const Interval& omega,
                                             double delta, int substeps,
                                             const FlowStepSettings& settings) {
    if (substeps < 1) throw std::invalid_argument("flow_control_period: substeps < 1");
    const double h = delta / double(substeps);

    ControlPeriodFlow out;
    TaylorModelVector cur = state;
    for (int k = 0; k < substeps; ++k) {
        TaylorModelVector seg_tm = picard_flow_step(cur, v, omega, h, settings);
        FlowSegment seg;
        seg.t_begin = h * double(k);
        seg.t_end = h * double(k + 1);
        seg.x_box = tm_range(seg_tm[0]);
        seg.y_box = tm_range(seg_tm[1]);
        seg.theta_box = tm_range(seg_tm[2]);
        TaylorModelVector end;
        for (std::size_t i = 0; i < 3; ++i)
            end.comps.push_back(tm_eval_time(seg_tm[i], h));
        seg.tm = std::move(seg_tm);
        out.segments.push_back(std::move(seg));
        cur = std::move(end);
    }
    out.end_state = tm_recenter_box(cur, settings.tm_degree);
    return out;
}

}  // namespace rvnav
