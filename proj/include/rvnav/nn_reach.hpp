#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvnav/bernstein.hpp"
#include "rvnav/interval.hpp"
#include "rvnav/network.hpp"
#include "rvnav/polynomial.hpp"
#include "rvnav/taylor_model.hpp"

namespace rvnav {

// Re-cap a Taylor model to a different degree bound; terms above the new cap
// are range-evaluated into the remainder.
inline TaylorModel tm_change_degree(const TaylorModel& a, int cap) {
    if (a.poly.max_degree == cap) return a;
    const auto& table = MonomialTable::instance();
    Polynomial p(cap);
    Interval spilled{0.0};
    for (std::size_t i = 0; i < a.poly.coef.size(); ++i) {
        const double c = a.poly.coef[i];
        if (c == 0.0) continue;
        const Exponents& e = table.exponents(i);
        if (total_degree(e) <= cap)
            p.coef[std::size_t(table.index_of(e))] = c;
        else
            spilled = spilled + Interval{c} * monomial_range(e, a.dom);
    }
    return TaylorModel{std::move(p), a.rem + spilled, a.dom};
}

namespace detail {

// Inflation applied to pre-activation ranges. It absorbs the ulp-scale
// difference between the stepwise remainder transport and the deferred
// matrix-queue transport, so one activation enclosure is valid for both.
inline double range_pad(const Interval& rho) {
    return 1e-9 * std::max(rho.mag(), 1e-3) + 1e-12;
}

struct TransportFactor {
    const NetworkLayer* dense = nullptr;  // null => diagonal
    std::vector<Interval> diag;
};

struct DeferredBox {
    std::size_t pos;  // first factor index NOT yet applied to this box
    std::vector<Interval> box;
};

// rows x cols interval matrix stored row-major.
struct IvMat {
    int rows = 0, cols = 0;
    std::vector<Interval> m;

    static IvMat identity(int n) {
        IvMat r;
        r.rows = r.cols = n;
        r.m.assign(std::size_t(n) * std::size_t(n), Interval{0.0});
        for (int i = 0; i < n; ++i) r.m[std::size_t(i * n + i)] = Interval{1.0};
        return r;
    }

    Interval& at(int i, int j) { return m[std::size_t(i * cols + j)]; }
    const Interval& at(int i, int j) const { return m[std::size_t(i * cols + j)]; }
};

inline IvMat apply_factor(const IvMat& s, const TransportFactor& f) {
    IvMat r;
    r.rows = s.rows;
    if (f.dense != nullptr) {
        const NetworkLayer& l = *f.dense;
        if (s.cols != l.out) throw std::logic_error("transport factor shape mismatch");
        r.cols = l.in;
        r.m.assign(std::size_t(r.rows) * std::size_t(r.cols), Interval{0.0});
        for (int i = 0; i < r.rows; ++i)
            for (int k = 0; k < l.out; ++k) {
                const Interval& sik = s.at(i, k);
                if (sik.lo == 0.0 && sik.hi == 0.0) continue;
                for (int j = 0; j < l.in; ++j) {
                    const double w = l.w(k, j);
                    if (w == 0.0) continue;
                    r.at(i, j) = r.at(i, j) + sik * w;
                }
            }
    } else {
        if (s.cols != int(f.diag.size()))
            throw std::logic_error("transport factor shape mismatch");
        r.cols = s.cols;
        r.m = s.m;
        for (int i = 0; i < r.rows; ++i)
            for (int j = 0; j < r.cols; ++j) r.at(i, j) = r.at(i, j) * f.diag[std::size_t(j)];
    }
    return r;
}

inline void accumulate_contribution(std::vector<Interval>& total, const IvMat& s,
                                    const std::vector<Interval>& box) {
    if (int(box.size()) != s.cols) throw std::logic_error("deferred box shape mismatch");
    for (int i = 0; i < s.rows; ++i) {
        Interval acc{0.0};
        for (int j = 0; j < s.cols; ++j) acc = acc + s.at(i, j) * box[std::size_t(j)];
        total[std::size_t(i)] = total[std::size_t(i)] + acc;
    }
}

}  // namespace detail

// Layer-by-layer Taylor-model propagation of the network over the input
// enclosure. Each layer applies the affine map exactly on polynomials and
// transports remainders through the weight matrix; each ReLU neuron gets a
// Bernstein enclosure on its pre-activation range, composed into the TM with
// the activation error added to the remainder.
//
// With symbolic_remainder set, every remainder contribution is additionally
// carried through a queue of linear transport factors (weight matrices and
// per-neuron derivative ranges) that is folded once at the output, avoiding
// the wrapping effect of stepwise interval transport. The result takes the
// tighter of the two bounds per component, so it is never wider than the
// stepwise one.
inline TaylorModelVector nn_tm_propagate(const NetworkSpec& net,
                                         const TaylorModelVector& input, int bp_order,
                                         int tm_degree, bool symbolic_remainder) {
    net.validate();
    if (int(input.size()) != net.input_dim())
        throw std::invalid_argument("nn_tm_propagate: input dimension mismatch");
    if (bp_order < 1) throw std::invalid_argument("nn_tm_propagate: bp_order < 1");
    if (tm_degree < 1) throw std::invalid_argument("nn_tm_propagate: tm_degree < 1");

    const Domain dom = input.domain();
    std::vector<TaylorModel> tms;
    tms.reserve(input.size());
    for (const TaylorModel& c : input.comps) tms.push_back(tm_change_degree(c, tm_degree));

    std::vector<detail::TransportFactor> factors;
    std::vector<detail::DeferredBox> deferred;
    if (symbolic_remainder) {
        std::vector<Interval> rin;
        rin.reserve(tms.size());
        for (const TaylorModel& c : tms) rin.push_back(c.rem);
        deferred.push_back({0, std::move(rin)});
    }

    for (const NetworkLayer& layer : net.layers) {
        // affine map
        std::vector<TaylorModel> next;
        next.reserve(std::size_t(layer.out));
        std::vector<Interval> affine_slack(std::size_t(layer.out), Interval{0.0});
        for (int i = 0; i < layer.out; ++i) {
            Polynomial p(tm_degree);
            p.coef[0] = layer.bias[std::size_t(i)];
            double slack = 0.0;
            Interval racc{0.0};
            for (int j = 0; j < layer.in; ++j) {
                const double w = layer.w(i, j);
                if (w == 0.0) continue;
                poly_axpy(p, w, tms[std::size_t(j)].poly, slack);
                racc = racc + Interval{w} * tms[std::size_t(j)].rem;
            }
            const Interval sl = detail::slack_interval(slack);
            affine_slack[std::size_t(i)] = sl;
            next.push_back(TaylorModel{std::move(p), racc + sl, dom});
        }
        if (symbolic_remainder) {
            factors.push_back({&layer, {}});
            deferred.push_back({factors.size(), affine_slack});
        }
        tms = std::move(next);

        if (layer.act != Activation::Relu) continue;

        // ReLU enclosure per neuron
        std::vector<Interval> diag(std::size_t(layer.out), Interval{0.0});
        std::vector<Interval> act_box(std::size_t(layer.out), Interval{0.0});
        for (int i = 0; i < layer.out; ++i) {
            TaylorModel& tm = tms[std::size_t(i)];
            const TaylorModel poly_only{tm.poly, Interval{0.0}, dom};
            const Interval range_q = tm_range(poly_only);
            const Interval rho = range_q + tm.rem;
            const double pad = detail::range_pad(rho);

            if (rho.lo >= 0.0) {
                // exactly linear on the reachable values
                diag[std::size_t(i)] = Interval{1.0};
                if (rho.lo < pad) act_box[std::size_t(i)] = Interval{-pad, pad};
                continue;
            }
            if (rho.hi <= 0.0) {
                diag[std::size_t(i)] = Interval{0.0};
                if (rho.hi > -pad) act_box[std::size_t(i)] = Interval{-pad, pad};
                tm = TaylorModel::constant(0.0, tm_degree, dom);
                continue;
            }

            const Interval rho_used = widen(rho, pad);
            const ActivationEnclosure enc = bernstein_enclose_relu(rho_used, bp_order);

            if (symbolic_remainder) {
                TaylorModel pure = tm_compose_poly(enc.poly, poly_only, tm_degree);
                act_box[std::size_t(i)] = pure.rem + enc.error_bound;
                // mean-value factor: p'(xi) for xi between q(z) and q(z)+r
                const Interval rho_star = range_q + hull(widen(tm.rem, pad), Interval{0.0});
                diag[std::size_t(i)] = enc.poly.derivative().eval(rho_star);
            }

            TaylorModel composed = tm_compose_poly(enc.poly, tm, tm_degree);
            composed.rem = composed.rem + enc.error_bound;
            tm = std::move(composed);
        }
        if (symbolic_remainder) {
            factors.push_back({nullptr, std::move(diag)});
            deferred.push_back({factors.size(), std::move(act_box)});
        }
    }

    if (symbolic_remainder) {
        const int out_dim = net.output_dim();
        detail::IvMat suffix = detail::IvMat::identity(out_dim);
        std::vector<Interval> total(std::size_t(out_dim), Interval{0.0});
        for (const detail::DeferredBox& d : deferred)
            if (d.pos == factors.size()) detail::accumulate_contribution(total, suffix, d.box);
        for (std::size_t p = factors.size(); p-- > 0;) {
            suffix = detail::apply_factor(suffix, factors[p]);
            for (const detail::DeferredBox& d : deferred)
                if (d.pos == p) detail::accumulate_contribution(total, suffix, d.box);
        }
        for (int i = 0; i < out_dim; ++i)
            tms[std::size_t(i)].rem =
                intersect_enclosures(tms[std::size_t(i)].rem, total[std::size_t(i)]);
    }

    TaylorModelVector out;
    out.comps = std::move(tms);
    return out;
}

}  // namespace rvnav
