#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "counting.hpp"
#include "diophantine.hpp"
#include "heat.hpp"
#include "hyperbolic.hpp"
#include "models.hpp"
#include "smoothing.hpp"
#include "words.hpp"

namespace weyllab::acceptance {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
};

namespace detail {

inline std::string num(double v, int prec = 4)
{
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

inline Eigen::MatrixXd random_basis(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> U(-0.25, 0.25), S(0.8, 1.25);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) B(r, c) += U(rng);
        B.col(c) *= S(rng);
    }
    return B;
}

inline Point random_point(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Point x(n);
    for (int i = 0; i < n; ++i) x(i) = U(rng);
    return x;
}

} // namespace detail

// Spectral side against the lattice sum of the free-space kernel.
inline Outcome pretrace_oracle()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> L(20.0, 200.0), T2(0.5, 3.0), T3(1.5, 3.0);
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < 30; ++i) {
        const int n = i % 5 == 4 ? 3 : 2;
        const LatticeTorus tor = LatticeTorus::from_basis(detail::random_basis(rng, n));
        TransformParams p;
        p.lambda = L(rng);
        p.T = n == 2 ? T2(rng) : T3(rng);
        const Point x = detail::random_point(rng, n);
        const Point y = i % 3 == 0 ? x : Point(detail::random_point(rng, n));
        const Spectrum spec = torus_spectrum(tor, required_frequency(p, n));
        const double ks = k_spectral(spec, x, y, p).value;
        const double kg = K_geodesic_torus(tor, x, y, p);
        const double err = std::abs(ks - kg) / (1.0 + std::abs(ks));
        worst = std::max(worst, err);
        if (!(err < 1e-6)) ++failures;
    }
    return {failures == 0, "30 configs, worst relative difference " + detail::num(worst)};
}

// Main-term cancellation on flat tori with T below the shortest loop.
inline Outcome cancellation()
{
    double worst = 0.0;
    bool ok = true;
    for (int n : {2, 3}) {
        const LatticeTorus tor = LatticeTorus::unit(n);
        const Point x = Point::Constant(n, 0.3);
        for (double lam : {50.0, 100.0, 200.0}) {
            TransformParams p;
            p.lambda = lam;
            p.T = 0.9 * tor.shortest_loop();
            p.tol = 1e-7;
            const Spectrum spec = torus_spectrum(tor, required_frequency(p, n), {100000000, false});
            const double kt = k_tilde_spectral(spec, x, p);
            const double ratio = std::abs(kt) / (1e-5 * std::pow(lam, 0.5 * (n - 1)));
            worst = std::max(worst, ratio);
            ok = ok && ratio < 1.0;
        }
    }
    return {ok, "max |k~| / (1e-5 lambda^{(n-1)/2}) = " + detail::num(worst)};
}

// Leading oscillatory term of the flat kernel at r = 1, T = 2.
inline Outcome leading_term()
{
    const double r = 1.0, T = 2.0;
    const double Q = fit_leading_constant(2, r, T, 1600.0);
    LeadingTermModel m{2, Q};
    double worst = 0.0;
    for (double lam : {100.0, 200.0, 400.0, 800.0}) {
        TransformParams p;
        p.lambda = lam;
        p.T = T;
        const double v = std::abs(K_free_space(2, r, p) - K_leading(m, r, 1.0, p)) * std::sqrt(lam) / K_leading_peak(m, r, 1.0, p);
        worst = std::max(worst, v);
    }
    return {worst <= 1.0, "Q(2) = " + detail::num(Q, 10) + ", sup scaled error " + detail::num(worst)};
}

// Laplace transform of the renormalized remainder on S^3.
inline Outcome laplace_probe()
{
    const Spectrum spec = sphere_spectrum(SphereModel::of_dimension(3), 200.0);
    Point x = Point::Zero(4);
    x(0) = 1.0;
    const LaplaceReport rep = laplace_remainder_check(spec, x, geometric_grid(1e-3, 1e-2, 12), 50.0, 2000.0);
    const bool ok = rep.max_rel_deviation < 0.05 && rep.min_dyadic_sup >= 0.05;
    return {ok, "max deviation from a_1 " + detail::num(rep.max_rel_deviation) + ", dyadic-block sup " +
                    detail::num(rep.min_dyadic_sup) + " (window sup " + detail::num(rep.window_sup) + ")"};
}

inline Outcome heat_coefficients()
{
    const auto grid = geometric_grid(2e-3, 2e-2, 16);
    const Spectrum s2 = sphere_spectrum(SphereModel::of_dimension(2), 250.0);
    const HeatFit fs = fit_heat_coefficients(heat_samples(s2, std::nullopt, grid), 2, 2);
    const double a1 = fs.coefficients[1] / fs.coefficients[0];
    const Spectrum t2 = torus_spectrum(LatticeTorus::unit(2), 250.0, {100000000, false});
    const HeatFit ft = fit_heat_coefficients(heat_samples(t2, std::nullopt, grid), 2, 2);
    const double rel = std::abs(ft.coefficients[1]) / ft.coefficients[0];
    const bool ok = std::abs(a1 - 1.0 / 3.0) < 0.02 / 3.0 && rel < 1e-2;
    return {ok, "S^2 a_1 = " + detail::num(a1, 6) + ", torus |c_1|/c_0 = " + detail::num(rel)};
}

inline Outcome remainder_exponents()
{
    const Spectrum t2 = torus_spectrum(LatticeTorus::unit(2), 2000.0, {100000000, false});
    const CountingSeries R = count_series(t2, std::nullopt, std::nullopt, 2000.0, SeriesKind::R_global);
    const ProbeReport pt = omega_probe(R, 0.5, std::make_pair(20.0, 2000.0));
    const Spectrum s2 = sphere_spectrum(SphereModel::of_dimension(2), 200.0);
    Point x = Point::Zero(3);
    x(2) = 1.0;
    const CountingSeries Rx = count_series(s2, x, std::nullopt, 200.0, SeriesKind::R_x);
    const ProbeReport ps = omega_probe(Rx, 1.0, std::make_pair(20.0, 200.0));
    const bool ok = pt.exponent >= 0.45 && pt.exponent <= 0.75 && ps.exponent >= 0.95 && ps.exponent <= 1.05;
    return {ok, "torus R exponent " + detail::num(pt.exponent) + ", S^2 R_x exponent " + detail::num(ps.exponent)};
}

inline Complex octagon_x() { return {0.0371, 1.0213}; }
inline Complex octagon_y() { return {-0.0193, 1.0297}; }

inline Outcome orbit_growth()
{
    const GroupPresentation G = octagon_group();
    OrbitOptions opt;
    opt.cap = 5'000'000;
    const GrowthReport g = S_growth(G, octagon_x(), octagon_y(), linear_grid(4.0, 9.0, 21), opt);
    const double es = g.value_fit.slope, ec = g.count_fit.slope;
    const bool ok = es >= 0.35 && es <= 0.65 && ec >= 0.85 && ec <= 1.15 && g.ratio >= 0.4 && g.ratio <= 0.6;
    return {ok, "S exponent " + detail::num(es) + ", count exponent " + detail::num(ec) + ", ratio " + detail::num(g.ratio)};
}

inline Outcome geodesic_growth_probe()
{
    const GroupPresentation G = octagon_group();
    const ConjClassResult cc = conj_classes(G, 10.0);
    const GrowthReport g = geodesic_growth(cc.classes, linear_grid(4.0, 10.0, 25));
    const double e = g.value_fit.slope;
    return {e >= 0.3 && e <= 0.7, "geodesic-sum exponent " + detail::num(e) + ", prime-count exponent " +
                                      detail::num(g.count_fit.slope) + ", classes " + std::to_string(cc.classes.size()) +
                                      ", flagged " + std::to_string(cc.flagged)};
}

inline Outcome diophantine_solvers()
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> Nd(1, 6);
    std::uniform_real_distribution<double> Rd(0.5, 5.0), Yd(2.0, 10.0), Md(1.0, 10.0), U(0.0, 1.0);
    int small = 0, small_ok = 0, bad_witness = 0, successes = 0;
    for (int i = 0; i < 200; ++i) {
        AlignmentProblem p;
        const int N = Nd(rng);
        for (int j = 0; j < N; ++j) p.radii.push_back(Rd(rng));
        p.Y = Yd(rng);
        p.M1 = Md(rng);
        p.budget = 200'000;
        if (N <= 2) {
            p.interval_hi = p.M1 * std::pow(p.Y, N) * 100.0;
            p.budget = 100'000'000;
        }
        const AlignmentResult r = box_search(p);
        if (r.success) {
            ++successes;
            if (!(box_quality(p.radii, r.value) < p.target()) || r.value < p.M1 || r.value > p.hi()) ++bad_witness;
        }
        if (N <= 2) {
            ++small;
            small_ok += r.success ? 1 : 0;
        }
    }
    int align_fail = 0;
    for (int i = 0; i < 200; ++i) {
        const double T = 100.0 + 900.0 * U(rng);
        const double A = 1.5 + 2.5 * U(rng);
        const double Y = 3.0 * A / pi * (1.05 + 2.0 * U(rng));
        const int N = 1 + static_cast<int>(8 * U(rng));
        std::vector<double> radii, b;
        for (int j = 0; j < N; ++j) {
            radii.push_back(T / A + (T - T / A) * U(rng));
            b.push_back((2.0 * U(rng) - 1.0) / Y);
        }
        const AlignmentResult r = align_intervals(radii, b, T, A, Y);
        if (!r.success || !(min_shifted_sine(radii, b, r.value) >= 1.0 / (2.0 * T)) || r.value < 0.0 || r.value > 1.0) ++align_fail;
    }
    const bool ok = bad_witness == 0 && small_ok == small && align_fail == 0;
    return {ok, "box: " + std::to_string(successes) + "/200 witnesses, " + std::to_string(bad_witness) + " failed re-check, N<=2 " +
                    std::to_string(small_ok) + "/" + std::to_string(small) + "; intervals: " + std::to_string(200 - align_fail) + "/200"};
}

inline Outcome word_properties()
{
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> Ld(2, 16), Gd(2, 3);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const int g = Gd(rng);
        const Word w = random_primitive_word(rng, g, static_cast<std::size_t>(Ld(rng)));
        if (!cyclic_shifts_distinct(w)) ++bad;
        const Word u = random_reduced_word(rng, g, static_cast<std::size_t>(Ld(rng)));
        const Word noisy = [&] {
            Word v = u;
            v.insert(v.begin(), -u.back());
            v.push_back(u.back());
            return v;
        }();
        const Word c = cyclic_reduce(noisy);
        if (cyclic_reduce(c) != c || !is_cyclically_reduced(c)) ++bad;
        Word sq = w;
        sq.insert(sq.end(), w.begin(), w.end());
        try {
            cyclic_shifts_distinct(sq);
            ++bad;
        } catch (const DomainError&) {
        }
    }
    return {bad == 0, std::to_string(100 - bad) + "/100 words satisfy shifts-distinct, idempotence and power rejection"};
}

inline Outcome pressure_formulas()
{
    const PressureReport c = pressure_const(1.0, 2);
    bool ok = c.h == 1.0 && c.pressure == 0.5;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> K(0.1, 5.0);
    std::uniform_int_distribution<int> Nd(2, 6);
    int bad = 0;
    for (int i = 0; i < 50; ++i) {
        double k1 = K(rng), k2 = K(rng);
        if (k1 < k2) std::swap(k1, k2);
        const int n = Nd(rng);
        const PressureReport p = pressure_bounds(k1, k2, n);
        const bool good = p.pressure_lower >= 0.5 * (n - 1) * k2 - 1e-12 && p.h_lower == (n - 1) * k2 && p.h_upper == (n - 1) * k1 &&
                          p.h_lower <= p.h_upper && p.ratio_lower > 0.0 && std::abs(p.ratio_lower - k2 / (2.0 * k1)) < 1e-15 &&
                          p.pressure_lower / p.h_upper >= p.ratio_lower - 1e-15;
        bad += good ? 0 : 1;
    }
    ok = ok && bad == 0;
    return {ok, "constant curvature h=" + detail::num(c.h) + " P=" + detail::num(c.pressure) + "; bounds violated in " +
                    std::to_string(bad) + "/50 pairs"};
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

inline std::vector<Criterion> primary_suite()
{
    return {
        {1, "pretrace oracle", 120.0, pretrace_oracle},
        {2, "main-term cancellation", 60.0, cancellation},
        {3, "leading term", 120.0, leading_term},
        {4, "Laplace remainder probe", 60.0, laplace_probe},
        {5, "heat coefficients", 30.0, heat_coefficients},
        {6, "remainder exponents", 120.0, remainder_exponents},
        {7, "orbit-sum growth", 600.0, orbit_growth},
        {8, "closed-geodesic sum growth", 600.0, geodesic_growth_probe},
        {9, "alignment solvers", 60.0, diophantine_solvers},
        {10, "free-group word properties", 5.0, word_properties},
        {11, "pressure formulas", 1.0, pressure_formulas},
    };
}

inline CriterionResult run_criterion(const Criterion& c)
{
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.budget_seconds = c.budget_seconds;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Outcome o = c.run();
        r.passed = o.passed;
        r.detail = o.detail;
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
        r.passed = false;
        r.detail += " (runtime over budget)";
    }
    return r;
}

inline std::string format_row(const CriterionResult& r)
{
    std::ostringstream s;
    s << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  (" << detail::num(r.seconds, 3) << " s / "
      << r.budget_seconds << " s)  " << r.detail;
    return s.str();
}

} // namespace weyllab::acceptance
