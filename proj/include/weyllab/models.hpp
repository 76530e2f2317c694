#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "special.hpp"

namespace weyllab {

using Point = Eigen::VectorXd;

struct LatticeTorus {
    Eigen::MatrixXd basis; // columns are the lattice generators
    Eigen::MatrixXd dual;  // columns are the dual generators, dual^T basis = I
    int n = 0;
    double volume = 0.0;

    static LatticeTorus from_basis(const Eigen::MatrixXd& b)
    {
        if (b.rows() != b.cols() || b.rows() < 2) throw ConfigError("torus basis must be a square matrix of size >= 2");
        if (!b.allFinite()) throw ConfigError("torus basis has non-finite entries");
        const int n = static_cast<int>(b.rows());
        const double det = b.determinant();
        const double scale = std::pow(b.norm(), n);
        if (!(std::abs(det) > 1e-12 * scale)) throw ConfigError("torus basis is singular");
        LatticeTorus t;
        t.basis = b;
        t.n = n;
        t.volume = std::abs(det);
        t.dual = b.inverse().transpose();
        const double err = (t.dual.transpose() * b - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        if (err > 1e-10) throw ConfigError("torus basis too ill-conditioned to invert");
        return t;
    }

    static LatticeTorus unit(int n) { return from_basis(Eigen::MatrixXd::Identity(n, n)); }

    // Cartesian point reduced into the cell B [0,1)^n.
    Point reduce(const Point& x) const
    {
        if (x.size() != n) throw DomainError("torus point has wrong dimension");
        Eigen::VectorXd f = basis.colPivHouseholderQr().solve(x);
        for (int i = 0; i < n; ++i) f(i) -= std::floor(f(i));
        return basis * f;
    }

    double shortest_loop() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) best = std::min(best, basis.col(i).norm());
        LatticeEnumerator en(basis);
        en.enumerate(Eigen::VectorXd::Zero(n), best, [&](const std::vector<std::int64_t>&, double d2) {
            if (d2 > 1e-20) best = std::min(best, std::sqrt(d2));
        });
        return best;
    }
};

struct SphereModel {
    int n = 2;
    double volume = 0.0;
    double scalar_curvature = 0.0;

    static SphereModel of_dimension(int n)
    {
        if (n < 2) throw ConfigError("sphere dimension must be >= 2");
        return SphereModel{n, sphere_volume(n), static_cast<double>(n) * (n - 1)};
    }
};

class ManifoldModel {
public:
    ManifoldModel(LatticeTorus t) : v_(std::move(t)) {}
    ManifoldModel(SphereModel s) : v_(std::move(s)) {}

    bool is_torus() const { return std::holds_alternative<LatticeTorus>(v_); }
    bool is_sphere() const { return std::holds_alternative<SphereModel>(v_); }
    const LatticeTorus& torus() const
    {
        if (!is_torus()) throw DomainError("model is not a torus");
        return std::get<LatticeTorus>(v_);
    }
    const SphereModel& sphere() const
    {
        if (!is_sphere()) throw DomainError("model is not a sphere");
        return std::get<SphereModel>(v_);
    }
    int dimension() const { return is_torus() ? torus().n : sphere().n; }
    double volume() const { return is_torus() ? torus().volume : sphere().volume; }
    std::string name() const { return is_torus() ? "torus" : "sphere"; }

    // Local heat invariant a_j(x); the models are homogeneous so x is not needed.
    double heat_invariant(int j) const
    {
        if (j < 0) throw DomainError("heat invariant index must be >= 0");
        if (j == 0) return 1.0;
        if (is_torus()) return 0.0;
        if (j == 1) return sphere().scalar_curvature / 6.0;
        throw UnsupportedModelError("sphere heat invariants a_j with j >= 2 are not provided");
    }

    // kappa_x = min{ j >= 1 : a_j(x) != 0 }.
    double kappa() const { return is_torus() ? std::numeric_limits<double>::infinity() : 1.0; }

    // Validates (and for the torus reduces) a point.
    Point point(const Point& x) const
    {
        if (is_torus()) return torus().reduce(x);
        const int n = sphere().n;
        if (x.size() != n + 1) throw DomainError("sphere point must have n+1 coordinates");
        if (std::abs(x.norm() - 1.0) > 1e-12) throw DomainError("sphere point must have unit norm");
        return x;
    }

private:
    std::variant<LatticeTorus, SphereModel> v_;
};

struct SpectralLevel {
    double eigenvalue = 0.0;
    double sqrt_eigenvalue = 0.0;
    std::uint64_t multiplicity = 0;
    // Torus: range [first, first+count) of stored dual vectors. Only one vector of
    // each +-pair is stored; the zero level stores nothing.
    std::size_t first = 0;
    std::size_t count = 0;
    // Sphere: harmonic degree.
    std::int64_t degree = 0;
};

struct SpectrumOptions {
    std::uint64_t cap = 100000000ULL;
    bool keep_vectors = true;
};

class Spectrum {
public:
    const ManifoldModel& model() const { return model_; }
    const std::vector<SpectralLevel>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    const SpectralLevel& operator[](std::size_t i) const { return levels_[i]; }
    // Frequencies sqrt(lambda_i) <= frequency_max are all present.
    double frequency_max() const { return frequency_max_; }
    bool has_vectors() const { return !model_.is_torus() || vectors_kept_; }

    // Sum over the eigenspace of phi_i(x) phi_i(y).
    double pair_sum(std::size_t i, const Point& x, const Point& y) const
    {
        if (i >= levels_.size()) throw DomainError("level not in spectrum");
        const SpectralLevel& L = levels_[i];
        const double V = model_.volume();
        if (model_.is_torus()) {
            if (L.count == 0) return static_cast<double>(L.multiplicity) / V;
            if (!vectors_kept_) {
                if ((x - y).cwiseAbs().maxCoeff() == 0.0) return static_cast<double>(L.multiplicity) / V;
                throw DomainError("spectrum was built without dual vectors; off-diagonal pair sums unavailable");
            }
            const int n = model_.dimension();
            Eigen::VectorXd d = x - y;
            double s = 0.0;
            for (std::size_t j = 0; j < L.count; ++j) {
                const double* l = &dual_vectors_[(L.first + j) * static_cast<std::size_t>(n)];
                double dot = 0.0;
                for (int c = 0; c < n; ++c) dot += l[c] * d(c);
                s += 2.0 * std::cos(two_pi * dot);
            }
            return s / V;
        }
        const int n = model_.dimension();
        const double t = std::clamp(x.dot(y), -1.0, 1.0);
        return static_cast<double>(L.multiplicity) / V * gegenbauer_normalized(L.degree, 0.5 * (n - 1), t);
    }

    double diagonal_pair_sum(std::size_t i) const
    {
        if (i >= levels_.size()) throw DomainError("level not in spectrum");
        return static_cast<double>(levels_[i].multiplicity) / model_.volume();
    }

    // Stored dual vector j (cartesian coordinates) of a torus spectrum.
    const double* dual_vector(std::size_t j) const { return &dual_vectors_[j * static_cast<std::size_t>(model_.dimension())]; }

private:
    explicit Spectrum(ManifoldModel m) : model_(std::move(m)) {}
    friend Spectrum torus_spectrum(const LatticeTorus&, double, const SpectrumOptions&);
    friend Spectrum sphere_spectrum(const SphereModel&, double, const SpectrumOptions&);

    ManifoldModel model_;
    std::vector<SpectralLevel> levels_;
    std::vector<double> dual_vectors_;
    double frequency_max_ = 0.0;
    bool vectors_kept_ = true;
};

inline Spectrum torus_spectrum(const LatticeTorus& torus, double lambda_max, const SpectrumOptions& opt = {})
{
    if (!(lambda_max > 0.0)) throw DomainError("lambda_max must be positive");
    const int n = torus.n;
    const double radius = lambda_max / two_pi;
    // Rough ball-count guard before enumerating.
    const double shell = sigma_n(n) * std::pow(radius, n) * torus.volume;
    if (shell > 4.0 * static_cast<double>(opt.cap) + 1e3)
        throw ResourceError("torus spectrum to lambda_max=" + std::to_string(lambda_max) + " needs ~" +
                            std::to_string(shell) + " dual vectors, above the cap");

    struct Entry {
        double norm2;
        std::uint32_t idx;
    };
    std::vector<double> coords;
    std::vector<Entry> entries;
    LatticeEnumerator en(torus.dual);
    en.enumerate(
        Eigen::VectorXd::Zero(n), radius,
        [&](const std::vector<std::int64_t>& k, double) {
            // Keep the half with last nonzero coordinate positive (plus zero).
            int last = n - 1;
            while (last >= 0 && k[static_cast<std::size_t>(last)] == 0) --last;
            if (last >= 0 && k[static_cast<std::size_t>(last)] < 0) return;
            Eigen::VectorXd l = Eigen::VectorXd::Zero(n);
            for (int c = 0; c < n; ++c) l += torus.dual.col(c) * static_cast<double>(k[static_cast<std::size_t>(c)]);
            const double norm2 = l.squaredNorm();
            if (std::sqrt(norm2) > radius) return;
            entries.push_back({norm2, static_cast<std::uint32_t>(entries.size())});
            for (int c = 0; c < n; ++c) coords.push_back(l(c));
        },
        opt.cap);
    // Canonical order: by norm, ties by enumeration order (itself deterministic).
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.norm2 < b.norm2; });

    Spectrum s{ManifoldModel{torus}};
    s.frequency_max_ = lambda_max;
    s.vectors_kept_ = opt.keep_vectors;
    if (opt.keep_vectors) s.dual_vectors_.reserve(coords.size());
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i + 1;
        const double base = entries[i].norm2;
        while (j < entries.size() && (entries[j].norm2 - base) <= 1e-10 * base) ++j;
        SpectralLevel L;
        // The level value is the mean of the grouped norms.
        double acc = 0.0;
        for (std::size_t q = i; q < j; ++q) acc += entries[q].norm2;
        const double norm2 = base == 0.0 ? 0.0 : acc / static_cast<double>(j - i);
        L.eigenvalue = 4.0 * pi * pi * norm2;
        L.sqrt_eigenvalue = two_pi * std::sqrt(norm2);
        if (base == 0.0) {
            L.multiplicity = 1;
            L.count = 0;
        } else {
            L.multiplicity = 2 * (j - i);
            L.first = s.dual_vectors_.size() / static_cast<std::size_t>(n);
            L.count = opt.keep_vectors ? (j - i) : 0;
            if (opt.keep_vectors)
                for (std::size_t q = i; q < j; ++q)
                    for (int c = 0; c < n; ++c) s.dual_vectors_.push_back(coords[static_cast<std::size_t>(entries[q].idx) * n + c]);
        }
        s.levels_.push_back(L);
        i = j;
    }
    return s;
}

inline Spectrum sphere_spectrum(const SphereModel& sphere, double lambda_max, const SpectrumOptions& opt = {})
{
    if (!(lambda_max > 0.0)) throw DomainError("lambda_max must be positive");
    const int n = sphere.n;
    Spectrum s{ManifoldModel{sphere}};
    s.frequency_max_ = lambda_max;
    const double lam2 = lambda_max * lambda_max;
    for (std::int64_t k = 0;; ++k) {
        const double ev = static_cast<double>(k) * static_cast<double>(k + n - 1);
        if (ev > lam2) break;
        SpectralLevel L;
        L.eigenvalue = ev;
        L.sqrt_eigenvalue = std::sqrt(ev);
        L.multiplicity = sphere_multiplicity(k, n);
        L.degree = k;
        if (static_cast<std::uint64_t>(k) > opt.cap) throw ResourceError("sphere spectrum exceeded cap");
        s.levels_.push_back(L);
    }
    return s;
}

inline Spectrum model_spectrum(const ManifoldModel& m, double lambda_max, const SpectrumOptions& opt = {})
{
    return m.is_torus() ? torus_spectrum(m.torus(), lambda_max, opt) : sphere_spectrum(m.sphere(), lambda_max, opt);
}

inline double distance(const ManifoldModel& m, const Point& x, const Point& y)
{
    if (m.is_sphere()) return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
    const LatticeTorus& t = m.torus();
    const Eigen::VectorXd d = x - y;
    // Start from the rounded translate, then search the ball it defines.
    Eigen::VectorXd f = t.basis.colPivHouseholderQr().solve(d);
    for (int i = 0; i < t.n; ++i) f(i) = std::round(f(i));
    const Eigen::VectorXd c0 = d - t.basis * f;
    double best = c0.norm();
    LatticeEnumerator en(t.basis);
    en.enumerate(d, best * (1.0 + 1e-12) + 1e-300, [&](const std::vector<std::int64_t>& k, double) {
        Eigen::VectorXd v = d;
        for (int c = 0; c < t.n; ++c) v += t.basis.col(c) * static_cast<double>(k[static_cast<std::size_t>(c)]);
        best = std::min(best, v.norm());
    });
    return best;
}

// Nonzero lattice vector lengths <= T with multiplicities (lengths grouped at 1e-10 relative).
inline std::vector<std::pair<double, std::uint64_t>> loop_lengths(const LatticeTorus& t, double T)
{
    if (!(T > 0.0)) throw DomainError("loop_lengths: T must be positive");
    std::vector<double> lens;
    LatticeEnumerator en(t.basis);
    en.enumerate(Eigen::VectorXd::Zero(t.n), T, [&](const std::vector<std::int64_t>& k, double) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(t.n);
        for (int c = 0; c < t.n; ++c) v += t.basis.col(c) * static_cast<double>(k[static_cast<std::size_t>(c)]);
        const double len = v.norm();
        if (len > 0.0 && len <= T) lens.push_back(len);
    });
    std::sort(lens.begin(), lens.end());
    std::vector<std::pair<double, std::uint64_t>> out;
    for (double l : lens) {
        if (!out.empty() && l - out.back().first <= 1e-10 * out.back().first)
            ++out.back().second;
        else
            out.emplace_back(l, 1);
    }
    return out;
}

// Constant-curvature Jacobian density along a geodesic of length r.
// curvature_sign: -1 for curvature -K^2, 0 flat, +1 for curvature +K^2.
inline double g_density(int curvature_sign, double K, int n, double r)
{
    if (!(r > 0.0)) throw DomainError("g_density: r must be positive");
    if (curvature_sign == 0) return 1.0;
    if (!(K > 0.0)) throw DomainError("g_density: K must be positive");
    const double x = K * r;
    double ratio;
    if (curvature_sign < 0) {
        ratio = x < 1e-4 ? 1.0 + x * x / 6.0 : std::sinh(x) / x;
    } else {
        if (x >= pi) throw DomainError("g_density: r reaches the conjugate point pi/K");
        ratio = x < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    }
    return std::pow(ratio, n - 1);
}

} // namespace weyllab
