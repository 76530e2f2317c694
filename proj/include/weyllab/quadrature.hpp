#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace weyllab {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0; // summed |Kronrod - Gauss| over the final panels
    double l1 = 0.0;    // integral of |f|
    std::size_t panels = 0;
};

namespace detail {

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// 31-point Kronrod rule with its embedded 15-point Gauss rule on [a, b].
template <class F>
Panel gk31(F& f, double a, double b)
{
    using K = boost::math::quadrature::gauss_kronrod<double, 31>;
    using G = boost::math::quadrature::gauss<double, 15>;
    const auto& xk = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    // Gauss order 15 is odd: the centre is a Gauss node, and Gauss nodes sit at
    // the even Kronrod indices.
    double rk = f0 * wk[0], rg = f0 * wg[0], l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double fp = f(c + h * xk[i]), fm = f(c - h * xk[i]);
        rk += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) rg += (fp + fm) * wg[i / 2];
    }
    const double err = std::max(std::abs(rk - rg) * h, 4e-16 * std::abs(rk * h));
    return {a, b, rk * h, err, l1 * h};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod over consecutive panels [breaks[i], breaks[i+1]]:
// the panel with the largest error estimate is bisected until the summed
// estimate is below max(abs_tol, rel_tol * L1). Throws NumericError with the
// achieved estimate when the panel budget runs out first.
template <class F>
QuadratureResult integrate_breaks(F&& f, const std::vector<double>& breaks, double rel_tol = 1e-12,
                                  double abs_tol = 1e-15, std::size_t max_panels = 200000)
{
    std::priority_queue<detail::Panel> q;
    double err = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        detail::Panel p = detail::gk31(f, breaks[i], breaks[i + 1]);
        err += p.error;
        l1 += p.l1;
        q.push(p);
    }
    std::size_t count = q.size();
    auto target = [&] { return std::max(abs_tol, rel_tol * l1); };
    while (!q.empty() && err > target() && count < max_panels) {
        detail::Panel p = q.top();
        q.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            // Cannot split further; keep the panel as is.
            q.push({p.a, p.b, p.value, 0.0, p.l1});
            err -= p.error;
            continue;
        }
        detail::Panel L = detail::gk31(f, p.a, m), R = detail::gk31(f, m, p.b);
        err += L.error + R.error - p.error;
        l1 += L.l1 + R.l1 - p.l1;
        q.push(L);
        q.push(R);
        ++count;
    }
    QuadratureResult out;
    out.panels = q.size();
    // Sum in position order so the result does not depend on the refinement path.
    std::vector<detail::Panel> all;
    all.reserve(q.size());
    while (!q.empty()) {
        all.push_back(q.top());
        q.pop();
    }
    std::sort(all.begin(), all.end(), [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    for (const auto& p : all) {
        out.value += p.value;
        out.error += p.error;
        out.l1 += p.l1;
    }
    if (!(out.error <= std::max(abs_tol, rel_tol * out.l1)) || !std::isfinite(out.value))
        throw NumericError("quadrature did not converge: error estimate " + std::to_string(out.error), out.error);
    return out;
}

// Uniform panels of width at most `width` on [a, b].
inline std::vector<double> uniform_breaks(double a, double b, double width)
{
    std::vector<double> br;
    if (!(b > a)) return {a, a};
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / width)));
    br.reserve(m + 1);
    for (std::size_t i = 0; i <= m; ++i) br.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(m));
    br.back() = b;
    return br;
}

} // namespace weyllab
