#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "special.hpp"

namespace weyllab {

struct AlignmentProblem {
    std::vector<double> radii;
    double Y = 10.0;
    double M1 = 1.0;
    std::optional<double> quality;     // target for max_j |e^{i lambda r_j} - 1|; default 1/Y
    std::optional<double> interval_hi; // default M1 * Y^N
    std::uint64_t budget = 10'000'000; // objective evaluations

    double target() const { return quality ? *quality : 1.0 / Y; }
    double hi() const { return interval_hi ? *interval_hi : M1 * std::pow(Y, static_cast<double>(radii.size())); }

    void validate() const
    {
        if (radii.empty()) throw DomainError("alignment problem needs at least one radius");
        std::vector<double> r = radii;
        std::sort(r.begin(), r.end());
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0) || !std::isfinite(r[i])) throw DomainError("radii must be positive and finite");
            if (i > 0 && !(r[i] - r[i - 1] > 1e-12 * r[i])) throw DomainError("radii must be distinct");
        }
        if (!(Y > 1.0)) throw DomainError("Y must exceed 1");
        if (!(M1 > 0.0)) throw DomainError("M1 must be positive");
        if (!(target() > 0.0)) throw DomainError("quality must be positive");
        if (!(hi() > M1)) throw DomainError("empty search interval");
    }
};

struct AlignmentResult {
    double value = 0.0;   // lambda (box search) or mu (interval alignment)
    double quality = 0.0; // max |e^{i lambda r_j} - 1|, or min_j sin(...)
    std::uint64_t evaluations = 0;
    bool success = false;
    std::string stage;
};

// Independent check of a box witness using complex exponentials.
inline double box_quality(const std::vector<double>& radii, double lambda)
{
    double q = 0.0;
    for (double r : radii) q = std::max(q, std::abs(std::exp(std::complex<double>(0.0, lambda * r)) - 1.0));
    return q;
}

namespace detail {

inline double box_objective(const std::vector<double>& radii, double lambda)
{
    double q = 0.0;
    for (double r : radii) q = std::max(q, 2.0 * std::abs(std::sin(0.5 * lambda * r)));
    return q;
}

inline AlignmentResult make_box_result(const std::vector<double>& radii, double lambda, double target, std::uint64_t evals,
                                       const std::string& stage)
{
    AlignmentResult r;
    r.value = lambda;
    r.quality = box_quality(radii, lambda);
    r.evaluations = evals;
    r.success = r.quality < target;
    r.stage = stage;
    return r;
}

} // namespace detail

// Scan [M1, hi] on a grid of step 2 pi / (8 Y r_max); a sample whose cell
// could hold a value below the target (Lipschitz bound r_max) is refined by
// Brent minimization over its two neighbouring cells. The first refined point
// that meets the target is returned.
inline AlignmentResult box_search(const AlignmentProblem& p)
{
    p.validate();
    const double rmax = *std::max_element(p.radii.begin(), p.radii.end());
    const double h = two_pi / (8.0 * p.Y * rmax);
    const double target = p.target();
    const double hi = p.hi();
    const auto steps = static_cast<std::uint64_t>(std::ceil((hi - p.M1) / h));
    std::uint64_t evals = 0;
    double best_q = std::numeric_limits<double>::infinity(), best_l = p.M1;
    auto f = [&](double l) {
        ++evals;
        const double q = detail::box_objective(p.radii, l);
        if (q < best_q) {
            best_q = q;
            best_l = l;
        }
        return q;
    };
    auto lam = [&](std::uint64_t k) { return std::min(hi, p.M1 + static_cast<double>(k) * h); };
    double fprev = std::numeric_limits<double>::infinity(), fcur = f(lam(0));
    for (std::uint64_t k = 0; k <= steps; ++k) {
        if (evals >= p.budget) break;
        const double fnext = k < steps ? f(lam(k + 1)) : std::numeric_limits<double>::infinity();
        if (fcur < target) {
            const AlignmentResult r = detail::make_box_result(p.radii, lam(k), target, evals, "box");
            if (r.success) return r;
        }
        if (fcur <= fprev && fcur <= fnext && fcur - rmax * h < target) {
            const double a = k > 0 ? lam(k - 1) : lam(0);
            const double b = lam(std::min(k + 1, steps));
            boost::uintmax_t iters = 64;
            const auto m = boost::math::tools::brent_find_minima(f, a, b, 52, iters);
            if (m.second < target) {
                const AlignmentResult r = detail::make_box_result(p.radii, m.first, target, evals, "box");
                if (r.success) return r;
            }
        }
        fprev = fcur;
        fcur = fnext;
    }
    AlignmentResult r = detail::make_box_result(p.radii, best_l, target, evals, "box");
    r.success = false;
    return r;
}

inline double min_shifted_sine(const std::vector<double>& radii, const std::vector<double>& b, double mu)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < radii.size(); ++j) m = std::min(m, std::sin(mu * radii[j] + b[j]));
    return m;
}

// mu in [0, 1] with sin(mu r_j + b_j) >= 1/(2T) for all j, from the
// intersection of the intervals [(1/T - b_j)/r_j, (pi - 1/T - b_j)/r_j].
inline AlignmentResult align_intervals(const std::vector<double>& radii, const std::vector<double>& b, double T, double A, double Y)
{
    if (radii.empty() || radii.size() != b.size()) throw DomainError("align_intervals: radii and offsets must match and be nonempty");
    if (!(T > 0.0) || !(A >= 1.0)) throw DomainError("align_intervals: need T > 0 and A >= 1");
    if (!(Y > 3.0 * A / pi)) throw DomainError("align_intervals: need Y > 3A/pi");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (radii[j] < T / A * (1.0 - 1e-12) || radii[j] > T * (1.0 + 1e-12)) throw DomainError("align_intervals: radius outside [T/A, T]");
        if (std::abs(b[j]) > 1.0 / Y * (1.0 + 1e-12)) throw DomainError("align_intervals: offset exceeds 1/Y");
    }
    double P1 = -std::numeric_limits<double>::infinity(), P2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < radii.size(); ++j) {
        P1 = std::max(P1, (1.0 / T - b[j]) / radii[j]);
        P2 = std::min(P2, (pi - 1.0 / T - b[j]) / radii[j]);
    }
    AlignmentResult r;
    r.stage = "intervals";
    r.evaluations = radii.size();
    const double lo = std::max(P1, 0.0), hi = std::min(P2, 1.0);
    if (!(lo < hi)) {
        r.value = 0.5 * (P1 + P2);
        r.quality = min_shifted_sine(radii, b, r.value);
        return r;
    }
    r.value = std::clamp(0.5 * (P1 + P2), lo, hi);
    r.quality = min_shifted_sine(radii, b, r.value);
    r.success = r.quality >= 1.0 / (2.0 * T);
    return r;
}

struct SignAlignmentParams {
    double M1 = 1.0;
    double Y = 4.0;  // stage-1 resolution for the two-stage case
    double A = 3.0;  // long radii are those in [T/A, T]
    double h = 1.0;  // entropy and pressure enter only the admissibility check on A
    double P = 0.5;
    double delta = 0.1;
    std::optional<double> interval_hi;
    std::uint64_t budget = 10'000'000;
};

inline double leading_phase(int n) { return (pi / 4.0) * (3 - (n % 4)); }

// Chooses lambda so that all sin(lambda r_j + phi_n) share one sign and stay
// away from zero.
inline AlignmentResult sign_alignment(const std::vector<double>& radii, int n, double T, const SignAlignmentParams& prm = {})
{
    if (n < 1) throw DomainError("sign_alignment: dimension must be positive");
    const double phi = leading_phase(n);
    if (n % 4 != 3) {
        AlignmentProblem p;
        p.radii = radii;
        p.Y = 10.0;
        p.quality = 0.1;
        p.M1 = prm.M1;
        p.interval_hi = prm.interval_hi;
        p.budget = prm.budget;
        AlignmentResult r = box_search(p);
        r.stage = "box";
        if (!r.success) return r;
        double m = std::numeric_limits<double>::infinity();
        for (double x : radii) m = std::min(m, std::sin(r.value * x + phi));
        r.quality = m;
        r.success = m >= std::sin(phi) - 0.2;
        r.stage = "box+certify";
        return r;
    }
    if (!(prm.A > prm.h / (prm.P * (1.0 - 0.5 * prm.delta)))) throw DomainError("sign_alignment: A too small for the entropy/pressure ratio");
    std::vector<double> longr;
    for (double x : radii)
        if (x >= T / prm.A * (1.0 - 1e-12) && x <= T * (1.0 + 1e-12)) longr.push_back(x);
    if (longr.empty()) throw DomainError("sign_alignment: no radii in [T/A, T]");
    AlignmentProblem p;
    p.radii = longr;
    p.Y = prm.Y;
    p.quality = 2.0 * std::sin(0.5 / prm.Y); // |b_j| < 1/Y after stage 1
    p.M1 = prm.M1;
    p.interval_hi = prm.interval_hi;
    p.budget = prm.budget;
    AlignmentResult s1 = box_search(p);
    if (!s1.success) {
        s1.stage = "stage1";
        return s1;
    }
    std::vector<double> b;
    for (double x : longr) b.push_back(std::remainder(s1.value * x, two_pi));
    AlignmentResult s2 = align_intervals(longr, b, T, prm.A, prm.Y);
    s2.evaluations += s1.evaluations;
    if (!s2.success) {
        s2.stage = "stage2";
        return s2;
    }
    AlignmentResult r;
    r.value = s1.value + s2.value;
    r.evaluations = s2.evaluations;
    r.stage = "stage1+stage2";
    double m = std::numeric_limits<double>::infinity();
    for (double x : longr) m = std::min(m, std::sin(r.value * x));
    r.quality = m;
    r.success = m >= 1.0 / (2.0 * T);
    return r;
}

} // namespace weyllab
