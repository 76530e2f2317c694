#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "parallel.hpp"
#include "special.hpp"
#include "taylor.hpp"

namespace weyllab {

// The bump psi(t) = exp(1 - 1/(1-t^2)) on |t| < 1 and its cosine transform
// psi_hat(s) = 2 int_0^1 psi(z) cos(sz) dz, tabulated with value, first and
// second derivative and interpolated by quintic Hermite pieces.
class TestFunction {
public:
    // Trapezoid sums on [-1, 1] are spectrally accurate here because psi and all
    // its derivatives vanish at +-1; the error is the aliased sum
    // sum_{k != 0} psi_hat(s + 2 pi k N), negligible for s << 2 pi N.
    TestFunction(double s_table_max = 1024.0, double ds = 1.0 / 32.0, int quad_points = 512)
        : smax_(s_table_max), ds_(ds), npts_(quad_points)
    {
        const auto nodes = static_cast<std::size_t>(std::ceil(smax_ / ds_)) + 1;
        f0_.assign(nodes, 0.0);
        f1_.assign(nodes, 0.0);
        f2_.assign(nodes, 0.0);
        std::vector<double> z(static_cast<std::size_t>(npts_)), w(static_cast<std::size_t>(npts_));
        const double h = 1.0 / npts_;
        for (int j = 0; j < npts_; ++j) {
            z[static_cast<std::size_t>(j)] = j * h;
            // Weight 2h for interior nodes (mirror image), h at z = 0.
            w[static_cast<std::size_t>(j)] = (j == 0 ? h : 2.0 * h) * psi(j * h);
        }
        parallel_for(nodes, [&](std::size_t i) {
            const double s = static_cast<double>(i) * ds_;
            double a = 0.0, b = 0.0, c = 0.0;
            const std::complex<double> step(std::cos(s * h), std::sin(s * h));
            std::complex<double> e(1.0, 0.0);
            for (int j = 0; j < npts_; ++j) {
                // Re-seed the rotation periodically to keep rounding at a few ulps.
                if ((j & 15) == 0) e = std::complex<double>(std::cos(s * z[static_cast<std::size_t>(j)]), std::sin(s * z[static_cast<std::size_t>(j)]));
                const double wj = w[static_cast<std::size_t>(j)], zj = z[static_cast<std::size_t>(j)];
                a += wj * e.real();
                b -= wj * zj * e.imag();
                c -= wj * zj * zj * e.real();
                e *= step;
            }
            f0_[i] = a;
            f1_[i] = b;
            f2_[i] = c;
        });
        // Envelope: suffix maximum of |value| + ds |slope| + ds^2 |curvature| / 2.
        env_.assign(nodes, 0.0);
        double run = 0.0;
        for (std::size_t i = nodes; i-- > 0;) {
            run = std::max(run, std::abs(f0_[i]) + ds_ * std::abs(f1_[i]) + 0.5 * ds_ * ds_ * std::abs(f2_[i]));
            env_[i] = run;
        }
    }

    static const TestFunction& standard()
    {
        static const TestFunction tf;
        return tf;
    }

    static double psi(double t)
    {
        const double u = 1.0 - t * t;
        if (u <= 0.0) return 0.0;
        return std::exp(1.0 - 1.0 / u);
    }

    // psi'(t) = psi(t) * (-2t / (1-t^2)^2).
    static double psi_prime(double t)
    {
        const double u = 1.0 - t * t;
        if (u <= 0.0) return 0.0;
        return std::exp(1.0 - 1.0 / u) * (-2.0 * t / (u * u));
    }

    // Taylor jet of psi(t / T) at t0.
    static Jet psi_jet(double t0, double T, std::size_t order)
    {
        const double s0 = t0 / T;
        if (std::abs(s0) >= 1.0) return Jet(order, 0.0);
        Jet s = Jet::variable(order, t0);
        s[0] = s0;
        if (order >= 1) s[1] = 1.0 / T;
        const Jet v = 1.0 - s * s;
        const Jet w = v.reciprocal();
        if (1.0 - w.value() < -745.0) return Jet(order, 0.0);
        return (1.0 - w).exp();
    }

    double psi_hat(double s) const
    {
        s = std::abs(s);
        if (s >= smax_) return 0.0;
        const double x = s / ds_;
        auto i = static_cast<std::size_t>(x);
        if (i + 1 >= f0_.size()) i = f0_.size() - 2;
        const double t = x - static_cast<double>(i);
        return hermite5(i, t);
    }

    // Direct trapezoid evaluation with `points` nodes on [0, 1].
    static double psi_hat_quadrature(double s, int points)
    {
        const double h = 1.0 / points;
        double a = psi(0.0) * h;
        for (int j = 1; j < points; ++j) a += 2.0 * h * psi(j * h) * std::cos(s * j * h);
        return a;
    }

    // Bound on sup_{|u| >= |s|} |psi_hat(u)|.
    double envelope(double s) const
    {
        s = std::abs(s);
        if (s >= smax_) return env_.back();
        const auto i = static_cast<std::size_t>(s / ds_);
        return env_[std::min(i, env_.size() - 1)];
    }

    double table_max() const { return smax_; }
    double integral() const { return f0_[0]; }

private:
    double hermite5(std::size_t i, double t) const
    {
        const double h = ds_;
        const double p0 = f0_[i], p1 = f0_[i + 1];
        const double d0 = f1_[i] * h, d1 = f1_[i + 1] * h;
        const double c0 = f2_[i] * h * h, c1 = f2_[i + 1] * h * h;
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
        const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
        const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
        const double h21 = 0.5 * (t3 - 2 * t4 + t5);
        return h00 * p0 + h01 * p1 + h10 * d0 + h11 * d1 + h20 * c0 + h21 * c1;
    }

    double smax_, ds_;
    int npts_;
    std::vector<double> f0_, f1_, f2_, env_;
};

} // namespace weyllab
