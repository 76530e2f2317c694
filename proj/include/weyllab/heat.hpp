#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "counting.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "special.hpp"

namespace weyllab {

struct HeatValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

namespace detail {

// Constant C with (weighted) count N(mu) <= C mu^{n/2} for mu beyond the
// spectrum: twice the larger of the Weyl constant and the observed ratio over
// the top tenth of the available range.
inline double count_growth_constant(const Spectrum& spec, bool trace)
{
    const ManifoldModel& m = spec.model();
    const int n = m.dimension();
    const double scale = trace ? 1.0 : 1.0 / m.volume();
    double c = weyl_constant(n) * m.volume() * scale;
    double acc = 0.0;
    const double mu_max = spec.frequency_max() * spec.frequency_max();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        acc += static_cast<double>(spec[i].multiplicity) * scale;
        const double mu = spec[i].eigenvalue;
        if (mu > 0.81 * mu_max) c = std::max(c, acc / std::pow(mu, 0.5 * n));
    }
    return 2.0 * c;
}

// int_M^inf e^{-t mu} dN(mu) <= t int_M^inf e^{-t mu} C mu^{n/2} d mu = C t^{-n/2} Gamma(n/2 + 1, t M).
inline double heat_tail(double C, int n, double t, double M)
{
    return C * std::pow(t, -0.5 * n) * boost::math::tgamma(0.5 * n + 1.0, t * M);
}

} // namespace detail

// Diagonal heat kernel K(t,x,x) (x given) or heat trace (x absent) from the spectrum.
inline HeatValue heat_eval(const Spectrum& spec, const std::optional<Point>& x, double t, double rel_tol = 1e-6)
{
    if (!(t > 0.0)) throw DomainError("heat_eval: t must be positive");
    const bool trace = !x.has_value();
    std::vector<double> w(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) w[i] = trace ? static_cast<double>(spec[i].multiplicity) : spec.pair_sum(i, *x, *x);
    auto value_at = [&](double tt) {
        double v = 0.0;
        for (std::size_t i = spec.size(); i-- > 0;) v += w[i] * std::exp(-spec[i].eigenvalue * tt);
        return v;
    };
    const double C = detail::count_growth_constant(spec, trace);
    const int n = spec.model().dimension();
    const double M = spec.frequency_max() * spec.frequency_max();
    HeatValue out{value_at(t), detail::heat_tail(C, n, t, M)};
    if (out.tail_bound > rel_tol * out.value) {
        auto ok = [&](double tt) { return detail::heat_tail(C, n, tt, M) <= rel_tol * value_at(tt); };
        double lo = t, hi = 2.0 * t;
        while (!ok(hi)) hi *= 2.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
        throw ResourceError("t=" + std::to_string(t) + " too small for the available spectrum; minimal admissible t ~ " +
                                std::to_string(hi),
                            hi);
    }
    return out;
}

struct HeatSamples {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> tail;
};

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t m)
{
    if (!(lo > 0.0) || !(hi > lo) || m < 2) throw DomainError("geometric grid needs 0 < lo < hi and >= 2 points");
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(m - 1));
    return g;
}

inline HeatSamples heat_samples(const Spectrum& spec, const std::optional<Point>& x, const std::vector<double>& tgrid,
                                double rel_tol = 1e-6)
{
    HeatSamples s;
    for (double t : tgrid) {
        const HeatValue v = heat_eval(spec, x, t, rel_tol);
        s.t.push_back(t);
        s.value.push_back(v.value);
        s.tail.push_back(v.tail_bound);
    }
    return s;
}

struct HeatFit {
    std::vector<double> coefficients; // c_0..c_J of sum_j c_j t^{j - n/2}
    double residual = 0.0;            // RMS relative residual
    double condition = 0.0;           // of the column-scaled, row-weighted design
};

// Least squares fit of sum_{j=0}^{J} c_j t^{j-n/2}, rows weighted by 1/value.
inline HeatFit fit_heat_coefficients(const HeatSamples& s, int n, int J)
{
    if (J < 0 || J > 2) throw DomainError("fit_heat_coefficients: J must be in [0, 2]");
    const std::size_t m = s.t.size();
    if (m < static_cast<std::size_t>(J + 2)) throw DomainError("fit_heat_coefficients: too few samples");
    const auto [tmin, tmax] = std::minmax_element(s.t.begin(), s.t.end());
    if (*tmax < 10.0 * *tmin * (1.0 - 1e-12)) throw DomainError("fit_heat_coefficients: t grid must span at least one decade");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), J + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double w = 1.0 / s.value[i];
        for (int j = 0; j <= J; ++j) A(static_cast<Eigen::Index>(i), j) = w * std::pow(s.t[i], j - 0.5 * n);
        b(static_cast<Eigen::Index>(i)) = 1.0;
    }
    Eigen::VectorXd colscale(J + 1);
    for (int j = 0; j <= J; ++j) {
        colscale(j) = A.col(j).norm();
        A.col(j) /= colscale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    HeatFit fit;
    fit.condition = sv(0) / sv(sv.size() - 1);
    if (!(fit.condition < 1e12)) throw NumericError("fit_heat_coefficients: design matrix ill-conditioned", fit.condition);
    const Eigen::VectorXd c = svd.solve(b);
    for (int j = 0; j <= J; ++j) fit.coefficients.push_back(c(j) / colscale(j));
    const Eigen::VectorXd r = A * c - b;
    fit.residual = std::sqrt(r.squaredNorm() / static_cast<double>(m));
    return fit;
}

struct LaplaceReport {
    int n = 0;
    double a1 = 0.0;
    std::vector<double> t;
    std::vector<double> estimate; // (4 pi t)^{n/2} times the Laplace integral of the renormalized remainder
    double max_rel_deviation = 0.0;
    double mu_lo = 0.0, mu_hi = 0.0;
    double window_sup = 0.0;       // sup of |R(mu)| / mu^{n/2-1} over [mu_lo, mu_hi]
    double min_dyadic_sup = 0.0;   // min over blocks [mu, 2mu] inside the window of the block sup
};

// Exact Stieltjes form of int_0^inf e^{-t mu} R(mu) d mu:
// (1/t) sum_i w_i e^{-lambda_i t} - sigma_n Gamma(n/2+1) / (2 pi)^n t^{-n/2-1}.
// Scaled by (4 pi)^{n/2} t^{n/2} it tends to a_1(x) when kappa_x = 1.
inline LaplaceReport laplace_remainder_check(const Spectrum& spec, const Point& x, const std::vector<double>& tgrid,
                                             double mu_lo = 50.0, double mu_hi = 2000.0)
{
    const ManifoldModel& m = spec.model();
    const int n = m.dimension();
    LaplaceReport rep;
    rep.n = n;
    rep.a1 = m.heat_invariant(1);
    const double c = weyl_constant(n) * std::tgamma(0.5 * n + 1.0);
    for (double t : tgrid) {
        const HeatValue hv = heat_eval(spec, x, t);
        const double lhs = hv.value / t - c * std::pow(t, -0.5 * n - 1.0);
        const double est = std::pow(4.0 * pi * t, 0.5 * n) * lhs;
        rep.t.push_back(t);
        rep.estimate.push_back(est);
        const double dev = rep.a1 != 0.0 ? std::abs(est - rep.a1) / std::abs(rep.a1) : std::abs(est);
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev);
    }
    rep.mu_lo = mu_lo;
    rep.mu_hi = mu_hi;
    const CountingSeries R = renormalized_remainder(spec, x, mu_hi);
    const double p = 0.5 * n - 1.0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : R.rows) {
        if (r.lambda < mu_lo || r.lambda > mu_hi) continue;
        pts.emplace_back(r.lambda, std::max(std::abs(r.left), std::abs(r.right)) / std::pow(r.lambda, p));
    }
    for (const auto& q : pts) rep.window_sup = std::max(rep.window_sup, q.second);
    rep.min_dyadic_sup = pts.empty() ? 0.0 : 1e300;
    for (double lo = mu_lo; 2.0 * lo <= mu_hi * (1.0 + 1e-12); lo *= 1.25) {
        double s = 0.0;
        for (const auto& q : pts)
            if (q.first >= lo && q.first <= 2.0 * lo) s = std::max(s, q.second);
        rep.min_dyadic_sup = std::min(rep.min_dyadic_sup, s);
    }
    return rep;
}

} // namespace weyllab
