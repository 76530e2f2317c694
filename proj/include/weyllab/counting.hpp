#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fit.hpp"
#include "models.hpp"
#include "special.hpp"

namespace weyllab {

enum class SeriesKind { N_xy, N_x, N_global, R_x, R_global, R_osc, R_renormalized, samples };

inline const char* to_string(SeriesKind k)
{
    switch (k) {
    case SeriesKind::N_xy: return "N_xy";
    case SeriesKind::N_x: return "N_x";
    case SeriesKind::N_global: return "N";
    case SeriesKind::R_x: return "R_x";
    case SeriesKind::R_global: return "R";
    case SeriesKind::R_osc: return "R_osc";
    case SeriesKind::R_renormalized: return "R_renorm";
    case SeriesKind::samples: return "samples";
    }
    return "?";
}

inline SeriesKind series_kind_from(const std::string& s)
{
    if (s == "N_xy") return SeriesKind::N_xy;
    if (s == "N_x") return SeriesKind::N_x;
    if (s == "N") return SeriesKind::N_global;
    if (s == "R_x") return SeriesKind::R_x;
    if (s == "R") return SeriesKind::R_global;
    if (s == "R_osc") return SeriesKind::R_osc;
    throw ConfigError("unknown series kind '" + s + "'");
}

// A step function minus a smooth main term, sum_k coef_k * lambda^power_k.
// Rows are the sample abscissae (every jump plus optional grid points) with
// the one-sided values there; `right` is the value at lambda (right-continuous).
class CountingSeries {
public:
    struct Row {
        double lambda, left, right;
        bool jump;
    };

    SeriesKind kind = SeriesKind::samples;
    std::vector<Row> rows;
    std::vector<std::pair<double, double>> main; // (coefficient, power)

    double main_term(double lam) const
    {
        double s = 0.0;
        for (auto [c, p] : main) s += c * std::pow(lam, p);
        return s;
    }

    // Value at lambda (right limit).
    double evaluate(double lam) const
    {
        auto it = std::upper_bound(rows.begin(), rows.end(), lam, [](double v, const Row& r) { return v < r.lambda; });
        double step = 0.0;
        if (it != rows.begin()) {
            const Row& r = *(it - 1);
            step = r.right + main_term(r.lambda);
        } else if (!rows.empty()) {
            step = rows.front().left + main_term(rows.front().lambda);
        }
        return step - main_term(lam);
    }

    std::size_t jumps() const
    {
        std::size_t c = 0;
        for (const auto& r : rows) c += r.jump ? 1 : 0;
        return c;
    }

    CountingSeries scaled(double c) const
    {
        CountingSeries s = *this;
        for (auto& r : s.rows) {
            r.left *= c;
            r.right *= c;
        }
        for (auto& m : s.main) m.first *= c;
        return s;
    }

    static CountingSeries from_samples(const std::vector<double>& lam, const std::vector<double>& val)
    {
        if (lam.size() != val.size()) throw DomainError("from_samples: size mismatch");
        CountingSeries s;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            if (i > 0 && !(lam[i] > lam[i - 1])) throw DomainError("from_samples: abscissae must increase");
            s.rows.push_back({lam[i], val[i], val[i], true});
        }
        return s;
    }
};

namespace detail {

inline CountingSeries build_series(const std::vector<std::pair<double, double>>& jumps, double lambda_max,
                                   const std::vector<double>& grid, std::vector<std::pair<double, double>> main,
                                   SeriesKind kind)
{
    CountingSeries s;
    s.kind = kind;
    s.main = std::move(main);
    std::size_t gi = 0;
    double acc = 0.0;
    std::vector<double> g = grid;
    std::sort(g.begin(), g.end());
    auto emit_grid_until = [&](double lim, bool inclusive) {
        while (gi < g.size() && (g[gi] < lim || (inclusive && g[gi] <= lim)) && g[gi] <= lambda_max) {
            const double v = acc - s.main_term(g[gi]);
            s.rows.push_back({g[gi], v, v, false});
            ++gi;
        }
    };
    for (auto [loc, size] : jumps) {
        if (loc > lambda_max) break;
        emit_grid_until(loc, false);
        const double m = s.main_term(loc);
        const double before = acc - m;
        acc += size;
        s.rows.push_back({loc, before, acc - m, true});
        while (gi < g.size() && g[gi] == loc) ++gi;
    }
    emit_grid_until(lambda_max, true);
    return s;
}

} // namespace detail

// Counting function or remainder from the spectrum, up to lambda_max.
// x is needed for the local kinds, y only for N_xy.
inline CountingSeries count_series(const Spectrum& spec, const std::optional<Point>& x, const std::optional<Point>& y,
                                   double lambda_max, SeriesKind kind, const std::vector<double>& grid = {})
{
    if (!(lambda_max > 0.0)) throw DomainError("lambda_max must be positive");
    if (spec.frequency_max() < lambda_max) throw ResourceError("spectrum does not reach lambda_max", lambda_max);
    const ManifoldModel& m = spec.model();
    const int n = m.dimension();
    const double c = weyl_constant(n);
    const bool local = kind != SeriesKind::N_global && kind != SeriesKind::R_global;
    if (local && !x) throw DomainError("local counting function needs a point x");
    if (kind == SeriesKind::N_xy && !y) throw DomainError("N_xy needs a second point y");
    std::vector<std::pair<double, double>> jumps;
    jumps.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double w;
        if (kind == SeriesKind::N_global || kind == SeriesKind::R_global)
            w = static_cast<double>(spec[i].multiplicity);
        else if (kind == SeriesKind::N_xy)
            w = spec.pair_sum(i, *x, *y);
        else
            w = spec.pair_sum(i, *x, *x);
        jumps.emplace_back(spec[i].sqrt_eigenvalue, w);
    }
    std::vector<std::pair<double, double>> main;
    switch (kind) {
    case SeriesKind::R_x: main = {{c, static_cast<double>(n)}}; break;
    case SeriesKind::R_global: main = {{m.volume() * c, static_cast<double>(n)}}; break;
    case SeriesKind::R_osc: {
        const double pre = std::pow(4.0 * pi, -0.5 * n);
        for (int j = 0; j <= (n - 1) / 2; ++j) {
            const double a = m.heat_invariant(j);
            main.emplace_back(pre * a / std::tgamma(0.5 * n - j + 1.0), static_cast<double>(n - 2 * j));
        }
        break;
    }
    case SeriesKind::R_renormalized: throw DomainError("use renormalized_remainder for the mu-variable series");
    default: break;
    }
    return detail::build_series(jumps, lambda_max, grid, std::move(main), kind);
}

inline CountingSeries osc_remainder(const Spectrum& spec, const Point& x, double lambda_max)
{
    return count_series(spec, x, std::nullopt, lambda_max, SeriesKind::R_osc);
}

// Renormalized remainder in mu = lambda^2: N_x(sqrt mu) - sigma_n mu^{n/2} / (2 pi)^n.
inline CountingSeries renormalized_remainder(const Spectrum& spec, const Point& x, double mu_max)
{
    if (spec.frequency_max() * spec.frequency_max() < mu_max) throw ResourceError("spectrum does not reach mu_max", mu_max);
    const int n = spec.model().dimension();
    std::vector<std::pair<double, double>> jumps;
    for (std::size_t i = 0; i < spec.size(); ++i) jumps.emplace_back(spec[i].eigenvalue, spec.pair_sum(i, x, x));
    return detail::build_series(jumps, mu_max, {}, {{weyl_constant(n), 0.5 * n}}, SeriesKind::R_renormalized);
}

struct ProbeReport {
    double a = 0.0;
    std::vector<double> lambda;     // sample abscissae
    std::vector<double> running_sup; // s(lambda) = sup_{mu <= lambda} |f(mu)| / mu^a
    double exponent = 0.0;           // fitted slope of log max|f| vs log lambda
    double exponent_stderr = 0.0;
    double residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::size_t fit_points = 0;
};

// Running-sup probe. Both one-sided values at each jump enter the sup. The
// exponent is fitted to the running max of |f| on a log-uniform grid over the
// window (default: upper half of the sampled range on a log scale).
inline ProbeReport omega_probe(const CountingSeries& s, double a, std::optional<std::pair<double, double>> window = std::nullopt,
                               std::size_t grid_points = 64)
{
    if (s.jumps() < 50) throw DomainError("omega_probe needs at least 50 jumps, got " + std::to_string(s.jumps()));
    ProbeReport rep;
    rep.a = a;
    std::vector<double> runmax;
    double sup = 0.0, mx = 0.0;
    for (const auto& r : s.rows) {
        if (!(r.lambda > 0.0)) continue;
        const double v = std::max(std::abs(r.left), std::abs(r.right));
        mx = std::max(mx, v);
        sup = std::max(sup, v / std::pow(r.lambda, a));
        rep.lambda.push_back(r.lambda);
        rep.running_sup.push_back(sup);
        runmax.push_back(mx);
    }
    if (rep.lambda.size() < 2) throw DomainError("omega_probe: no positive abscissae");
    const double first = rep.lambda.front(), last = rep.lambda.back();
    if (window) {
        rep.window_lo = window->first;
        rep.window_hi = window->second;
    } else {
        rep.window_lo = std::sqrt(first * last);
        rep.window_hi = last;
    }
    if (!(rep.window_hi > rep.window_lo)) throw DomainError("omega_probe: empty window");
    std::vector<double> gx, gy;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double lam = rep.window_lo * std::pow(rep.window_hi / rep.window_lo, static_cast<double>(i) / static_cast<double>(grid_points - 1));
        auto it = std::upper_bound(rep.lambda.begin(), rep.lambda.end(), lam * (1.0 + 1e-12));
        if (it == rep.lambda.begin()) continue;
        // Use the last sample at or below the grid value, so the fit sees the
        // running max at its own abscissa.
        const auto j = static_cast<std::size_t>(it - rep.lambda.begin()) - 1;
        if (rep.lambda[j] < rep.window_lo * (1.0 - 1e-12)) continue;
        if (!gx.empty() && gx.back() == rep.lambda[j]) continue;
        if (runmax[j] > 0.0) {
            gx.push_back(rep.lambda[j]);
            gy.push_back(runmax[j]);
        }
    }
    if (gx.size() < 20) throw DomainError("omega_probe: fewer than 20 fit points in the window");
    const LineFit f = fit_loglog(gx, gy);
    rep.exponent = f.slope;
    rep.exponent_stderr = f.slope_stderr;
    rep.residual = f.residual;
    rep.fit_points = gx.size();
    return rep;
}

} // namespace weyllab
