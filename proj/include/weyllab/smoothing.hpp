#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "special.hpp"
#include "taylor.hpp"
#include "test_function.hpp"

namespace weyllab {

struct TransformParams {
    double lambda = 1.0;
    double T = 1.0;
    // Levels with T |sqrt(lambda_i) - lambda| > s_max are dropped. 0 selects the
    // smallest s_max whose estimated dropped tail is below tol.
    double s_max = 0.0;
    double tol = 1e-9;     // absolute budget for the dropped spectral tail
    double quad_tol = 1e-12; // relative tolerance of the geodesic-side quadratures

    void validate() const
    {
        if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
        if (!(T > 0.0)) throw DomainError("T must be positive");
        if (s_max < 0.0) throw DomainError("s_max must be >= 0");
        if (!(tol > 0.0) || !(quad_tol > 0.0)) throw DomainError("tolerances must be positive");
    }
};

// H_{lambda,T}(r) = (psi_hat(T(r+lambda)) + psi_hat(T(r-lambda))) / 2.
inline double H_window(double lambda, double T, double r)
{
    const auto& tf = TestFunction::standard();
    return 0.5 * (tf.psi_hat(T * (r + lambda)) + tf.psi_hat(T * (r - lambda)));
}
inline double H_window(const TransformParams& p, double r) { return H_window(p.lambda, p.T, r); }

namespace detail {

// Per-point Weyl density of eigenvalue weight in the frequency variable,
// n sigma_n rho^{n-1} / (2 pi)^n, doubled as a margin for lattice-count scatter.
inline double weight_density(int n, double rho) { return 2.0 * n * weyl_constant(n) * std::pow(std::max(rho, 1.0), n - 1); }

// Estimated sum of |H| over levels with frequency in the region excluded by
// (s_max, rho_cap): T|rho - lambda| > s_max or rho > rho_cap.
inline double window_tail_estimate(int n, const TransformParams& p, double s_max, double rho_cap)
{
    const auto& tf = TestFunction::standard();
    const double step = std::min(0.25 / p.T, 0.5);
    const double rho_end = p.lambda + tf.table_max() / p.T + 1.0;
    double sum = 0.0;
    for (double rho = 0.0; rho <= rho_end; rho += step) {
        const double dist = p.T * std::abs(rho - p.lambda);
        if (dist <= s_max && rho <= rho_cap) continue;
        const double h = 0.5 * (tf.envelope(dist) + tf.envelope(p.T * (rho + p.lambda)));
        sum += weight_density(n, rho) * h * step;
    }
    // Beyond the table the envelope is flat; bound the remaining mass by a
    // polynomial moment of that constant tail over one more table width.
    const double far = tf.envelope(tf.table_max());
    sum += far * weight_density(n, rho_end) * rho_end;
    return sum;
}

} // namespace detail

inline double resolve_s_max(const TransformParams& p, int n)
{
    if (p.s_max > 0.0) return p.s_max;
    const auto& tf = TestFunction::standard();
    const double limit = tf.table_max() - 8.0;
    for (double s = 20.0; s < limit; s += 10.0)
        if (detail::window_tail_estimate(n, p, s, 1e300) < 0.5 * p.tol) return s;
    return limit;
}

// Largest frequency that k_spectral needs from the spectrum.
inline double required_frequency(const TransformParams& p, int n) { return p.lambda + resolve_s_max(p, n) / p.T; }

struct TransformValue {
    double value = 0.0;
    double tail_bound = 0.0;
    double s_max = 0.0;
    std::size_t levels_used = 0;
};

// k_{lambda,T}(x, y) = sum_i phi_i(x) phi_i(y) H(sqrt(lambda_i)).
inline TransformValue k_spectral(const Spectrum& spec, const Point& x, const Point& y, const TransformParams& p)
{
    p.validate();
    const int n = spec.model().dimension();
    const double smax = resolve_s_max(p, n);
    const double need = p.lambda + smax / p.T;
    if (spec.frequency_max() < need * (1.0 - 1e-12))
        throw ResourceError("spectrum available to " + std::to_string(spec.frequency_max()) + ", k_spectral needs " +
                                std::to_string(need),
                            need);
    const auto& lv = spec.levels();
    const double lo_f = std::max(0.0, p.lambda - smax / p.T);
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(lv.begin(), lv.end(), lo_f, [](const SpectralLevel& L, double v) { return L.sqrt_eigenvalue < v; }) -
        lv.begin());
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(lv.begin(), lv.end(), need, [](double v, const SpectralLevel& L) { return v < L.sqrt_eigenvalue; }) -
        lv.begin());
    const bool diag = (x - y).cwiseAbs().maxCoeff() == 0.0;
    const ManifoldModel& m = spec.model();
    TransformValue out;
    out.s_max = smax;
    out.levels_used = hi > lo ? hi - lo : 0;
    if (m.is_torus() && !diag) {
        if (!spec.has_vectors()) throw DomainError("off-diagonal k_spectral needs stored dual vectors");
        const Eigen::VectorXd d = x - y;
        const double V = m.volume();
        out.value = ordered_sum(out.levels_used, [&](std::size_t q) {
            const SpectralLevel& L = lv[lo + q];
            const double h = H_window(p, L.sqrt_eigenvalue);
            if (L.count == 0) return h * static_cast<double>(L.multiplicity) / V;
            double s = 0.0;
            for (std::size_t j = 0; j < L.count; ++j) {
                const double* l = spec.dual_vector(L.first + j);
                double dot = 0.0;
                for (int c = 0; c < n; ++c) dot += l[c] * d(c);
                s += 2.0 * std::cos(two_pi * dot);
            }
            return h * s / V;
        });
    } else {
        out.value = ordered_sum(out.levels_used, [&](std::size_t q) {
            const std::size_t i = lo + q;
            const double w = diag ? spec.diagonal_pair_sum(i) : spec.pair_sum(i, x, y);
            return w * H_window(p, lv[i].sqrt_eigenvalue);
        });
    }
    // Tail: known levels below the window, then the Weyl-density estimate above.
    const auto& tf = TestFunction::standard();
    double tail = 0.0;
    for (std::size_t i = 0; i < lo; ++i)
        tail += spec.diagonal_pair_sum(i) * 0.5 *
                (tf.envelope(p.T * (p.lambda - lv[i].sqrt_eigenvalue)) + tf.envelope(p.T * (p.lambda + lv[i].sqrt_eigenvalue)));
    TransformParams above = p;
    tail += detail::window_tail_estimate(n, above, 1e300, need) ;
    out.tail_bound = tail;
    return out;
}

namespace detail {

// f(t) = psi(t/T) cos(lambda t) / T as a Taylor jet at t0.
inline Jet f_jet(double t0, const TransformParams& p, std::size_t order)
{
    Jet b = TestFunction::psi_jet(t0, p.T, order);
    Jet phase = Jet::variable(order, t0) * p.lambda;
    Jet c(order), s(order);
    phase.cos_sin(c, s);
    return (b * c) * (1.0 / p.T);
}

inline double f_prime(double t, const TransformParams& p)
{
    const double u = t / p.T;
    return (TestFunction::psi_prime(u) / p.T * std::cos(p.lambda * t) - p.lambda * TestFunction::psi(u) * std::sin(p.lambda * t)) /
           p.T;
}

// (1/t d/dt)^m f at r > 0.
inline double radial_derivative_power(double r, int m, const TransformParams& p)
{
    const auto order = static_cast<std::size_t>(m);
    Jet h = f_jet(r, p, order);
    for (int step = 0; step < m; ++step) {
        Jet d = h.derivative();
        Jet inv(d.order());
        double pw = 1.0 / r;
        for (std::size_t k = 0; k <= inv.order(); ++k) {
            inv[k] = (k % 2 == 0 ? 1.0 : -1.0) * pw;
            pw /= r;
        }
        h = d * inv;
    }
    return h.value();
}

// Same at small r from the even Taylor expansion of f at 0:
// (1/t d/dt)^m t^{2k} = 2k (2k-2) ... (2k-2m+2) t^{2k-2m}.
inline double radial_derivative_power_small(double r, int m, const TransformParams& p)
{
    const int terms = 14;
    const auto order = static_cast<std::size_t>(2 * (m + terms));
    const Jet f0 = f_jet(0.0, p, order);
    double sum = 0.0;
    for (int k = m; k < m + terms; ++k) {
        double fac = 1.0;
        for (int q = 0; q < m; ++q) fac *= static_cast<double>(2 * k - 2 * q);
        sum += f0[static_cast<std::size_t>(2 * k)] * fac * std::pow(r, 2 * (k - m));
    }
    return sum;
}

} // namespace detail

// Radial quadrature route: (2pi)^{-n/2} r^{1-n/2} int_0^inf H(rho) rho^{n/2} J_{n/2-1}(rho r) d rho,
// and at r = 0 the on-diagonal value int_0^inf H(rho) n sigma_n rho^{n-1} / (2pi)^n d rho.
inline double K_free_space_hankel(int n, double r, const TransformParams& p)
{
    p.validate();
    if (n < 1) throw DomainError("dimension must be >= 1");
    if (r < 0.0) throw DomainError("r must be >= 0");
    const auto& tf = TestFunction::standard();
    const double rho_max = p.lambda + tf.table_max() / p.T;
    double width = 0.5 * pi / p.T;
    if (r > 0.0) width = std::min(width, 0.5 * pi / r);
    width = std::min(width, 1.0);
    std::vector<double> br = uniform_breaks(0.0, rho_max, width);
    if (r == 0.0) {
        const double cn = n * weyl_constant(n);
        return integrate_breaks([&](double rho) { return H_window(p, rho) * cn * std::pow(rho, n - 1); }, br, p.quad_tol, 1e-14).value;
    }
    const double nu = 0.5 * n - 1.0;
    const double pref = std::pow(two_pi, -0.5 * n) * std::pow(r, 1.0 - 0.5 * n);
    auto integrand = [&](double rho) {
        if (rho == 0.0) return 0.0;
        // std::cyl_bessel_j rejects negative order; J_{-1/2}(z) = sqrt(2 / (pi z)) cos z.
        const double J = n == 1 ? std::sqrt(2.0 / (pi * rho * r)) * std::cos(rho * r) : std::cyl_bessel_j(nu, rho * r);
        return H_window(p, rho) * std::pow(rho, 0.5 * n) * J;
    };
    return pref * integrate_breaks(integrand, br, p.quad_tol, 1e-14).value;
}

// Flat-space smoothed wave kernel F_n(r) = (2 pi)^{-n} int H(|xi|) e^{i xi.v} d xi, |v| = r.
inline double K_free_space(int n, double r, const TransformParams& p)
{
    p.validate();
    if (n < 1) throw DomainError("dimension must be >= 1");
    if (r < 0.0) throw DomainError("r must be >= 0");
    if (r == 0.0) return K_free_space_hankel(n, 0.0, p);
    if (r >= p.T) return 0.0;
    if (n % 2 == 1) {
        // F_{n+2} = -(1/(2 pi r)) F_n' with F_1 = f.
        const int m = (n - 1) / 2;
        const double scale = std::pow(-1.0 / two_pi, m);
        if (m == 0) return detail::f_jet(r, p, 0).value();
        if (r < 0.05 * std::min(p.T, 1.0 / p.lambda)) return scale * detail::radial_derivative_power_small(r, m, p);
        return scale * detail::radial_derivative_power(r, m, p);
    }
    if (n == 2) {
        // F_2(r) = -(1/pi) int_r^T f'(t) / sqrt(t^2 - r^2) dt, with t = r + u^2.
        const double umax = std::sqrt(p.T - r);
        std::vector<double> br{0.0};
        const double scale_u = std::sqrt(2.0 * r);
        for (double u = 0.25 * scale_u; u < umax && u < 8.0 * scale_u; u *= 2.0) br.push_back(u);
        const double tw = std::min(two_pi / p.lambda, p.T / 8.0);
        for (double t = r + tw; t < p.T; t += tw) {
            const double u = std::sqrt(t - r);
            if (u > br.back()) br.push_back(u);
        }
        if (umax > br.back()) br.push_back(umax);
        auto integrand = [&](double u) { return detail::f_prime(r + u * u, p) / std::sqrt(u * u + 2.0 * r); };
        return -(2.0 / pi) * integrate_breaks(integrand, br, p.quad_tol, 1e-15).value;
    }
    return K_free_space_hankel(n, r, p);
}

// Geodesic side of the pretrace formula on a flat torus: sum over lattice
// translates with |x - y + Bk| < T.
inline double K_geodesic_torus(const LatticeTorus& torus, const Point& x, const Point& y, const TransformParams& p)
{
    p.validate();
    const Eigen::VectorXd d = x - y;
    std::vector<double> radii;
    LatticeEnumerator en(torus.basis);
    en.enumerate(d, p.T, [&](const std::vector<std::int64_t>& k, double) {
        Eigen::VectorXd v = d;
        for (int c = 0; c < torus.n; ++c) v += torus.basis.col(c) * static_cast<double>(k[static_cast<std::size_t>(c)]);
        radii.push_back(v.norm());
    });
    std::sort(radii.begin(), radii.end());
    std::vector<double> vals(radii.size());
    parallel_for(radii.size(), [&](std::size_t i) { vals[i] = K_free_space(torus.n, radii[i], p); });
    double s = 0.0;
    for (double v : vals) s += v;
    return s;
}

// k~_{lambda,T}(x) = k(x,x) minus the transform of the Weyl main term.
inline double k_tilde_spectral(const Spectrum& spec, const Point& x, const TransformParams& p)
{
    const double k = k_spectral(spec, x, x, p).value;
    return k - K_free_space_hankel(spec.model().dimension(), 0.0, p);
}

struct LeadingTermModel {
    int n = 2;
    std::optional<double> Q;

    double phase() const { return 0.25 * pi * static_cast<double>(3 - (n % 4)); }
};

// Q lambda^{(n-1)/2} psi(r/T) / (T sqrt(g r^{n-1})) sin(lambda r + phi_n).
inline double K_leading(const LeadingTermModel& model, double r, double g, const TransformParams& p)
{
    if (!model.Q) throw ConfigError("leading-term constant Q(" + std::to_string(model.n) + ") is not set");
    if (!(r > 0.0)) throw DomainError("K_leading needs r > 0");
    const int n = model.n;
    return *model.Q * std::pow(p.lambda, 0.5 * (n - 1)) * TestFunction::psi(r / p.T) /
           (p.T * std::sqrt(g * std::pow(r, n - 1))) * std::sin(p.lambda * r + model.phase());
}

// Peak magnitude of K_leading over the phase: |Q| lambda^{(n-1)/2} psi(r/T) / (T sqrt(g r^{n-1})).
inline double K_leading_peak(const LeadingTermModel& model, double r, double g, const TransformParams& p)
{
    if (!model.Q) throw ConfigError("leading-term constant is not set");
    const int n = model.n;
    return std::abs(*model.Q) * std::pow(p.lambda, 0.5 * (n - 1)) * TestFunction::psi(r / p.T) /
           (p.T * std::sqrt(g * std::pow(r, n - 1)));
}

// Least-squares Q over one phase period starting at lambda0, against the exact
// flat-space kernel.
inline double fit_leading_constant(int n, double r, double T, double lambda0, int samples = 64)
{
    LeadingTermModel unit{n, 1.0};
    double num = 0.0, den = 0.0;
    for (int i = 0; i < samples; ++i) {
        TransformParams p;
        p.lambda = lambda0 + two_pi / r * static_cast<double>(i) / samples;
        p.T = T;
        const double b = K_leading(unit, r, 1.0, p);
        num += K_free_space(n, r, p) * b;
        den += b * b;
    }
    if (!(den > 0.0)) throw NumericError("leading-term fit is degenerate");
    return num / den;
}

} // namespace weyllab
