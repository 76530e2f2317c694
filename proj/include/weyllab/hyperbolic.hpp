#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fit.hpp"
#include "models.hpp"
#include "special.hpp"
#include "words.hpp"

namespace weyllab {

using Complex = std::complex<double>;

// Element of PSL(2,R): a matrix of determinant 1 modulo sign.
struct Isometry {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Isometry identity() { return {}; }

    static Isometry make(double a, double b, double c, double d)
    {
        Isometry g{a, b, c, d};
        if (!(std::abs(g.det() - 1.0) < 1e-10)) throw ConfigError("isometry determinant " + std::to_string(g.det()) + " is not 1");
        return g.canonical();
    }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    // Sign fixed by the first nonzero of (trace, a, b).
    Isometry canonical() const
    {
        const double t = trace();
        const double key = t != 0.0 ? t : (a != 0.0 ? a : b);
        return key < 0.0 ? Isometry{-a, -b, -c, -d} : *this;
    }

    Isometry operator*(const Isometry& o) const
    {
        return Isometry{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d}.canonical();
    }

    Isometry inverse() const { return Isometry{d, -b, -c, a}.canonical(); }

    Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }

    bool is_hyperbolic() const { return std::abs(trace()) > 2.0; }

    double translation_length() const
    {
        const double t = std::abs(trace());
        if (!(t > 2.0)) return 0.0;
        return 2.0 * std::acosh(0.5 * t);
    }

    double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }
};

inline double max_abs_difference(const Isometry& g, const Isometry& h)
{
    return std::max({std::abs(g.a - h.a), std::abs(g.b - h.b), std::abs(g.c - h.c), std::abs(g.d - h.d)});
}

inline void check_upper(Complex z)
{
    if (!(z.imag() > 0.0)) throw DomainError("point must lie in the upper half-plane");
}

inline double hyp_distance(Complex z, Complex w)
{
    check_upper(z);
    check_upper(w);
    return 2.0 * std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

// Hyperboloid model, Minkowski form X0 Y0 - X1 Y1 - X2 Y2.
inline Eigen::Vector3d hyperboloid(Complex z)
{
    const double y = z.imag(), r2 = std::norm(z);
    return {(1.0 + r2) / (2.0 * y), (r2 - 1.0) / (2.0 * y), z.real() / y};
}

inline Eigen::Vector2d klein(Complex z)
{
    const Eigen::Vector3d X = hyperboloid(z);
    return {X(1) / X(0), X(2) / X(0)};
}

inline double klein_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& q)
{
    const double num = 1.0 - p.dot(q);
    const double den = std::sqrt((1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm()));
    return std::acosh(std::max(1.0, num / den));
}

// ---------------------------------------------------------------------------
// Group presentations

enum class GroupKind { free, surface };

struct GroupPresentation {
    std::string name;
    GroupKind kind = GroupKind::free;
    std::vector<Isometry> generators;
    std::optional<Word> relation;
    double min_translation = 0.0;
    std::optional<Complex> center;      // point whose Dirichlet domain has the generators as face pairings
    std::optional<double> diameter;     // configured bound on the fundamental-domain diameter
    std::optional<double> center_radius; // circumradius of the Dirichlet domain at center, filled by validate()

    int rank() const { return static_cast<int>(generators.size()); }

    Isometry letter(int s) const
    {
        const Isometry& g = generators.at(static_cast<std::size_t>(std::abs(s) - 1));
        return s > 0 ? g : g.inverse();
    }

    // Left-to-right product of the letters.
    Isometry evaluate(const Word& w) const
    {
        check_word(w, rank());
        Isometry g;
        for (int s : w) g = g * letter(s);
        return g;
    }

    void validate();
};

namespace detail {

struct MatKey {
    std::array<std::int64_t, 4> v;
    bool operator==(const MatKey& o) const { return v == o.v; }
};

struct MatKeyHash {
    std::size_t operator()(const MatKey& k) const
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::int64_t x : k.v) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
};

constexpr double key_scale = 1e8;

// Primary key first, then the neighbouring cells for coordinates that sit
// within 5% of a cell width from a rounding boundary.
inline std::vector<MatKey> key_variants(const Isometry& g)
{
    const std::array<double, 4> e{g.a, g.b, g.c, g.d};
    MatKey base{};
    std::array<std::int64_t, 4> alt{};
    std::array<bool, 4> near{};
    for (int i = 0; i < 4; ++i) {
        const double s = e[static_cast<std::size_t>(i)] * key_scale;
        const double r = std::nearbyint(s);
        base.v[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(r);
        near[static_cast<std::size_t>(i)] = 0.5 - std::abs(s - r) < 0.05;
        alt[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(r) + (s > r ? 1 : -1);
    }
    std::vector<MatKey> out{base};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!near[i]) continue;
        const std::size_t m = out.size();
        for (std::size_t j = 0; j < m; ++j) {
            MatKey k = out[j];
            k.v[i] = alt[i];
            out.push_back(k);
        }
    }
    return out;
}

// Key matches are confirmed at 1e-10 relative to the entry size.
inline bool confirm_match(const Isometry& g, const Isometry& h)
{
    const double scale = std::max({1.0, g.max_abs(), h.max_abs()});
    if (max_abs_difference(g, h) <= 1e-10 * scale) return true;
    throw NumericError("matrix dedup ambiguity: keys agree at 1e-8 but entries differ beyond 1e-10",
                       max_abs_difference(g, h) / scale);
}

// Set of group elements keyed by rounded canonical matrices.
class ElementSet {
public:
    bool contains(const Isometry& g) const { return find(g) != npos; }

    std::size_t find(const Isometry& g) const
    {
        for (const MatKey& k : key_variants(g)) {
            auto it = map_.find(k);
            if (it != map_.end() && confirm_match(g, elems_[it->second])) return it->second;
        }
        return npos;
    }

    // Returns false if already present.
    bool insert(const Isometry& g)
    {
        if (find(g) != npos) return false;
        map_.emplace(key_variants(g).front(), elems_.size());
        elems_.push_back(g);
        return true;
    }

    std::size_t size() const { return elems_.size(); }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::unordered_map<MatKey, std::size_t, MatKeyHash> map_;
    std::vector<Isometry> elems_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Orbit enumeration

struct OrbitEntry {
    std::uint32_t node = 0;
    Isometry matrix;
    Complex point;
    double distance = 0.0;
};

struct OrbitOptions {
    std::size_t cap = 5'000'000;       // entries with r <= T
    std::size_t node_cap = 12'000'000; // all stored group elements, including the pruning margin
    std::optional<double> margin;
};

struct OrbitResult {
    std::vector<OrbitEntry> entries; // sorted by (distance, matrix key)
    std::vector<std::uint32_t> parent;
    std::vector<std::int8_t> last_letter;
    std::size_t nodes = 0;
    double margin = 0.0;

    Word word(const OrbitEntry& e) const
    {
        Word w;
        for (std::uint32_t i = e.node; last_letter[i] != 0; i = parent[i]) w.push_back(last_letter[i]);
        std::reverse(w.begin(), w.end());
        return w;
    }
};

// Largest displacement d(y, g y) over the generators (inverses move y equally far).
inline double generator_displacement(const GroupPresentation& G, Complex y)
{
    double m = 0.0;
    for (const auto& g : G.generators) m = std::max(m, hyp_distance(y, g.apply(y)));
    return m;
}

inline double orbit_margin(const GroupPresentation& G, Complex x, Complex y)
{
    double m = 2.0 * generator_displacement(G, y);
    if (G.center && G.center_radius)
        m = std::min(m, *G.center_radius + 2.0 * (hyp_distance(x, *G.center) + hyp_distance(y, *G.center)));
    return m;
}

// Breadth-first growth by right multiplication with generators, deduplicated
// by matrix. A node is kept while d(x, g y) <= T + margin; the margin makes the
// result contain every element with d(x, g y) <= T.
inline OrbitResult orbit_enumerate(const GroupPresentation& G, Complex x, Complex y, double T, const OrbitOptions& opt = {})
{
    check_upper(x);
    check_upper(y);
    if (!(T > 0.0)) throw DomainError("orbit_enumerate: T must be positive");
    if (G.generators.empty()) throw ConfigError("group has no generators");
    OrbitResult res;
    res.margin = opt.margin ? *opt.margin : orbit_margin(G, x, y);
    const double R = T + res.margin;
    // d <= R  <=>  |x - p|^2 / (Im x Im p) <= 2 (cosh R - 1)
    const double qmax = 2.0 * (std::cosh(R) - 1.0) * (1.0 + 1e-12);
    const double qT = 2.0 * (std::cosh(T) - 1.0);

    std::vector<int> letters;
    std::vector<Isometry> mats;
    for (int k = 1; k <= G.rank(); ++k) {
        letters.push_back(k);
        mats.push_back(G.letter(k));
        letters.push_back(-k);
        mats.push_back(G.letter(-k));
    }

    std::vector<Isometry> node_g{Isometry::identity()};
    std::vector<Complex> node_p{y};
    std::vector<double> node_q{std::norm(x - y) / (x.imag() * y.imag())};
    res.parent.push_back(0);
    res.last_letter.push_back(0);
    std::unordered_map<detail::MatKey, std::uint32_t, detail::MatKeyHash> index;
    index.reserve(1024);
    index.emplace(detail::key_variants(node_g[0]).front(), 0);
    std::size_t within = node_q[0] <= qT ? 1 : 0;

    auto lookup = [&](const Isometry& g) {
        for (const auto& k : detail::key_variants(g)) {
            auto it = index.find(k);
            if (it != index.end() && detail::confirm_match(g, node_g[it->second])) return true;
        }
        return false;
    };

    std::size_t begin = 0, end = 1;
    while (begin < end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int last = res.last_letter[i];
            for (std::size_t s = 0; s < letters.size(); ++s) {
                if (last != 0 && letters[s] == -last) continue;
                const Isometry g = node_g[i] * mats[s];
                const Complex p = g.apply(y);
                const double q = std::norm(x - p) / (x.imag() * p.imag());
                if (!(q <= qmax)) continue;
                if (lookup(g)) continue;
                if (node_g.size() >= opt.node_cap)
                    throw ResourceError("orbit enumeration exceeded node cap " + std::to_string(opt.node_cap) +
                                            "; partial results are unusable",
                                        static_cast<double>(opt.node_cap));
                const auto id = static_cast<std::uint32_t>(node_g.size());
                index.emplace(detail::key_variants(g).front(), id);
                node_g.push_back(g);
                node_p.push_back(p);
                node_q.push_back(q);
                res.parent.push_back(static_cast<std::uint32_t>(i));
                res.last_letter.push_back(static_cast<std::int8_t>(letters[s]));
                if (q <= qT && ++within > opt.cap)
                    throw ResourceError("orbit enumeration exceeded entry cap " + std::to_string(opt.cap) +
                                            "; partial results are unusable",
                                        static_cast<double>(opt.cap));
            }
        }
        begin = end;
        end = node_g.size();
    }
    res.nodes = node_g.size();
    for (std::size_t i = 0; i < node_g.size(); ++i) {
        const double dist = 2.0 * std::asinh(0.5 * std::sqrt(node_q[i]));
        if (dist <= T) res.entries.push_back({static_cast<std::uint32_t>(i), node_g[i], node_p[i], dist});
    }
    std::sort(res.entries.begin(), res.entries.end(), [](const OrbitEntry& u, const OrbitEntry& v) {
        if (u.distance != v.distance) return u.distance < v.distance;
        return detail::key_variants(u.matrix).front().v < detail::key_variants(v.matrix).front().v;
    });
    return res;
}

// ---------------------------------------------------------------------------
// Dirichlet domains (Klein model polygons)

struct DirichletFace {
    Isometry g;
    Word word;
    Eigen::Vector3d normal; // X(g x0) - X(x0); the domain is {X : <X, normal> >= 0}
};

struct DirichletDomain {
    Complex center;
    std::vector<DirichletFace> faces;
    std::vector<Eigen::Vector2d> vertices; // Klein coordinates, cyclic order
    std::vector<int> edge_face;            // face index of the edge vertices[i] -> vertices[i+1]
    double radius = 0.0;                   // max distance from center to a vertex

    static double side(const Eigen::Vector3d& n, const Eigen::Vector2d& k) { return n(0) - n(1) * k(0) - n(2) * k(1); }
};

namespace detail {

inline bool clip_polygon(std::vector<Eigen::Vector2d>& poly, std::vector<int>& labels, const Eigen::Vector3d& n, int label)
{
    std::vector<Eigen::Vector2d> out;
    std::vector<int> outl;
    const std::size_t m = poly.size();
    bool cut = false;
    for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Vector2d& P = poly[i];
        const Eigen::Vector2d& Q = poly[(i + 1) % m];
        const double fp = DirichletDomain::side(n, P), fq = DirichletDomain::side(n, Q);
        const bool inP = fp >= 0.0, inQ = fq >= 0.0;
        if (!inP || !inQ) cut = true;
        const Eigen::Vector2d X = P + (fp / (fp - fq)) * (Q - P);
        if (inP) {
            out.push_back(P);
            outl.push_back(labels[i]);
            if (!inQ) {
                out.push_back(X);
                outl.push_back(label);
            }
        } else if (inQ) {
            out.push_back(X);
            outl.push_back(labels[i]);
        }
    }
    poly = std::move(out);
    labels = std::move(outl);
    return cut;
}

} // namespace detail

// Dirichlet domain at x0 for the elements of an orbit enumeration around x0.
// Throws when the resulting polygon is not compact.
inline DirichletDomain dirichlet_from_orbit(Complex x0, const OrbitResult& orb)
{
    DirichletDomain D;
    D.center = x0;
    std::vector<Eigen::Vector2d> poly{{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}};
    std::vector<int> labels(4, -1);
    const Eigen::Vector3d X0 = hyperboloid(x0);
    std::vector<DirichletFace> cand;
    for (const auto& e : orb.entries) {
        if (e.distance < 1e-9) continue;
        cand.push_back({e.matrix, orb.word(e), hyperboloid(e.point) - X0});
    }
    for (std::size_t f = 0; f < cand.size(); ++f) detail::clip_polygon(poly, labels, cand[f].normal, static_cast<int>(f));
    for (const auto& v : poly)
        if (!(v.squaredNorm() < 1.0 - 1e-12)) throw DomainError("Dirichlet polygon is not compact for these elements");
    // Keep only faces that carry an edge; relabel.
    std::unordered_map<int, int> remap;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const int l = labels[i];
        if (l < 0) throw DomainError("Dirichlet polygon has an unclipped edge");
        if (!remap.count(l)) {
            remap[l] = static_cast<int>(D.faces.size());
            D.faces.push_back(cand[static_cast<std::size_t>(l)]);
        }
        D.edge_face.push_back(remap[l]);
    }
    D.vertices = poly;
    const Eigen::Vector2d k0 = klein(x0);
    for (const auto& v : poly) D.radius = std::max(D.radius, klein_distance(k0, v));
    return D;
}

// Builds the Dirichlet domain at x0, enlarging the element set until every
// element with d(x0, g x0) <= 2 * radius has been used.
inline DirichletDomain dirichlet_domain(const GroupPresentation& G, Complex x0, std::optional<double> margin = std::nullopt)
{
    OrbitOptions opt;
    opt.margin = margin ? *margin : 2.0 * generator_displacement(G, x0);
    double R = 2.0 * generator_displacement(G, x0);
    for (int attempt = 0; attempt < 8; ++attempt) {
        const OrbitResult orb = orbit_enumerate(G, x0, x0, R, opt);
        try {
            DirichletDomain D = dirichlet_from_orbit(x0, orb);
            if (2.0 * D.radius <= R) return D;
            R = 2.0 * D.radius + 1e-6;
        } catch (const DomainError&) {
            R *= 1.5;
        }
    }
    throw NumericError("Dirichlet domain construction did not stabilize");
}

inline void GroupPresentation::validate()
{
    if (generators.empty()) throw ConfigError("group '" + name + "' has no generators");
    if (generators.size() > 100) throw ConfigError("too many generators");
    for (auto& g : generators) {
        if (!(std::abs(g.det() - 1.0) < 1e-10)) throw ConfigError("generator determinant is not 1");
        g = g.canonical();
        if (!g.is_hyperbolic()) throw ConfigError("generator is not hyperbolic (|trace| <= 2)");
    }
    if (!(min_translation > 0.0)) throw ConfigError("min_translation must be positive");
    for (const auto& g : generators)
        if (g.translation_length() < min_translation - 1e-9)
            throw ConfigError("a generator translates less than min_translation");
    if (kind == GroupKind::surface && !relation) throw ConfigError("surface group needs a relation");
    if (relation) {
        const Isometry r = evaluate(*relation);
        const double frob = std::sqrt((r.a - 1) * (r.a - 1) + r.b * r.b + r.c * r.c + (r.d - 1) * (r.d - 1));
        if (!(frob < 1e-8)) throw ConfigError("relation does not evaluate to +-identity (Frobenius error " + std::to_string(frob) + ")");
    }
    center_radius.reset();
    if (center) {
        check_upper(*center);
        if (kind == GroupKind::surface) center_radius = dirichlet_domain(*this, *center).radius;
    }
}

// ---------------------------------------------------------------------------
// Orbit sums

inline double S_sum(const std::vector<OrbitEntry>& entries, int n, double K, double T = std::numeric_limits<double>::infinity())
{
    double s = 0.0;
    for (const auto& e : entries) {
        if (e.distance > T) break;
        if (e.distance < 1e-12) throw DomainError("x coincides with an orbit point of y");
        const double r = e.distance;
        s += 1.0 / std::sqrt(g_density(-1, K, n, r) * std::pow(r, n - 1));
    }
    return s;
}

struct GrowthReport {
    std::vector<double> T;
    std::vector<double> count;
    std::vector<double> value;
    LineFit value_fit; // log value vs T, weights = count
    LineFit count_fit; // log count vs T, weights = count
    double ratio = 0.0; // value exponent / count exponent
};

namespace detail {

inline GrowthReport growth_fit(const std::vector<double>& Ts, const std::vector<double>& count, const std::vector<double>& value,
                               bool count_times_T = false)
{
    GrowthReport g;
    g.T = Ts;
    g.count = count;
    g.value = value;
    std::vector<double> x, yv, yc, w;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!(count[i] > 0.0) || !(value[i] > 0.0)) continue;
        x.push_back(Ts[i]);
        yv.push_back(std::log(value[i]));
        yc.push_back(std::log(count_times_T ? count[i] * Ts[i] : count[i]));
        w.push_back(count[i]);
    }
    if (x.size() < 3) throw DomainError("growth fit needs at least 3 grid points with nonzero counts");
    g.value_fit = fit_line(x, yv, w);
    g.count_fit = fit_line(x, yc, w);
    g.ratio = g.value_fit.slope / g.count_fit.slope;
    return g;
}

} // namespace detail

inline std::vector<double> linear_grid(double lo, double hi, std::size_t m)
{
    if (m < 2 || !(hi > lo)) throw DomainError("linear grid needs lo < hi and >= 2 points");
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    return g;
}

// S_{x,y}(T) and the orbit count on a T grid from a single enumeration.
inline GrowthReport S_growth(const std::vector<OrbitEntry>& entries, const std::vector<double>& Tgrid, int n = 2, double K = 1.0)
{
    std::vector<double> cnt, val;
    std::size_t j = 0;
    double s = 0.0;
    for (double T : Tgrid) {
        while (j < entries.size() && entries[j].distance <= T) {
            const double r = entries[j].distance;
            if (r < 1e-12) throw DomainError("x coincides with an orbit point of y");
            s += 1.0 / std::sqrt(g_density(-1, K, n, r) * std::pow(r, n - 1));
            ++j;
        }
        cnt.push_back(static_cast<double>(j));
        val.push_back(s);
    }
    return detail::growth_fit(Tgrid, cnt, val);
}

inline GrowthReport S_growth(const GroupPresentation& G, Complex x, Complex y, const std::vector<double>& Tgrid,
                             const OrbitOptions& opt = {}, int n = 2, double K = 1.0)
{
    if (Tgrid.empty() || !std::is_sorted(Tgrid.begin(), Tgrid.end())) throw DomainError("T grid must be nonempty and sorted");
    return S_growth(orbit_enumerate(G, x, y, Tgrid.back(), opt).entries, Tgrid, n, K);
}

// ---------------------------------------------------------------------------
// Constant-curvature dynamics

inline double unstable_jacobian(double r, double K, int n)
{
    if (!(r >= 0.0)) throw DomainError("unstable_jacobian: r must be >= 0");
    return std::exp((n - 1) * K * r);
}

inline double srb_Z(double r, double K, int n)
{
    if (!(r >= 0.0)) throw DomainError("srb_Z: r must be >= 0");
    return (n - 1) * K * r;
}

inline double srb_potential(double K, int n) { return (n - 1) * K; }

struct PressureReport {
    int n = 2;
    double K1 = 1.0, K2 = 1.0;
    bool exact = false;       // constant curvature: h and P are exact
    double h = 0.0;           // exact entropy (constant curvature)
    double h_lower = 0.0;     // (n-1) K2
    double h_upper = 0.0;     // (n-1) K1
    double pressure = 0.0;    // P(-H/2), exact case
    double pressure_lower = 0.0; // (n-1) K2 / 2
    double ratio_lower = 0.0;    // lower bound for P(-H/2)/h
};

inline PressureReport pressure_const(double K, int n)
{
    if (!(K > 0.0) || n < 2) throw DomainError("pressure_const needs K > 0 and n >= 2");
    PressureReport p;
    p.n = n;
    p.K1 = p.K2 = K;
    p.exact = true;
    p.h = p.h_lower = p.h_upper = (n - 1) * K;
    p.pressure = p.pressure_lower = 0.5 * (n - 1) * K;
    p.ratio_lower = 0.5;
    return p;
}

inline PressureReport pressure_bounds(double K1, double K2, int n)
{
    if (!(K2 > 0.0) || !(K1 >= K2) || n < 2) throw DomainError("pressure_bounds needs K1 >= K2 > 0 and n >= 2");
    PressureReport p;
    p.n = n;
    p.K1 = K1;
    p.K2 = K2;
    p.exact = K1 == K2;
    p.h_lower = (n - 1) * K2;
    p.h_upper = (n - 1) * K1;
    p.pressure_lower = 0.5 * (n - 1) * K2;
    p.ratio_lower = K2 / (2.0 * K1);
    if (p.exact) {
        p.h = p.h_lower;
        p.pressure = p.pressure_lower;
    } else {
        p.h = std::numeric_limits<double>::quiet_NaN();
        p.pressure = std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

// ---------------------------------------------------------------------------
// Conjugacy classes and closed geodesics

struct ConjClass {
    Word word;            // cyclically reduced representative, minimal rotation
    double length = 0.0;  // 2 arccosh(|trace| / 2)
    bool primitive = true;
    int power = 1;
    int shift_count = 0;
    Isometry matrix;
};

struct ConjClassResult {
    std::vector<ConjClass> classes; // sorted by (length, word)
    std::size_t flagged = 0;        // ambiguous classes, excluded
    std::size_t candidates = 0;
    std::string method;
};

// Smallest distance between the isometric circles (w.r.t. the disk centre at
// `center`) of the generators and their inverses. For a Schottky group every
// cyclically reduced word of length L translates by at least L times this.
inline double schottky_separation(const GroupPresentation& G, Complex center = {0.0, 1.0})
{
    check_upper(center);
    // Conjugate so that center goes to i, then to the disk.
    const double y = center.imag(), x = center.real();
    const Isometry to_i{1.0 / std::sqrt(y), -x / std::sqrt(y), 0.0, std::sqrt(y)};
    const Isometry back = to_i.inverse();
    struct Circle {
        std::complex<double> c;
        double r;
    };
    std::vector<Circle> circles;
    const Complex I(0.0, 1.0);
    for (int s = -G.rank(); s <= G.rank(); ++s) {
        if (s == 0) continue;
        const Isometry h = to_i * G.letter(s) * back;
        // Disk form C^{-1} h C with C = [[i, i], [-1, 1]]: [[alpha, beta], [conj beta, conj alpha]].
        const Complex A(h.a), B(h.b), Cc(h.c), Dd(h.d);
        const Complex alpha = 0.5 * (A + Dd + I * (B - Cc));
        const Complex beta = 0.5 * (A - Dd - I * (B + Cc));
        if (std::abs(beta) < 1e-12) throw DomainError("generator fixes the centre; no isometric circle");
        circles.push_back({-std::conj(alpha) / std::conj(beta), 1.0 / std::abs(beta)});
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j) {
            const auto& p = circles[i];
            const auto& q = circles[j];
            const double inv = (std::norm(p.c - q.c) - p.r * p.r - q.r * q.r) / (2.0 * p.r * q.r);
            if (!(inv > 1.0)) throw DomainError("isometric circles intersect; not a Schottky configuration");
            best = std::min(best, std::acosh(inv));
        }
    return best;
}

namespace detail {

inline void sort_classes(std::vector<ConjClass>& v)
{
    std::sort(v.begin(), v.end(), [](const ConjClass& a, const ConjClass& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.word < b.word;
    });
}

inline ConjClassResult free_conj_classes(const GroupPresentation& G, double T_len)
{
    const double delta = schottky_separation(G, G.center.value_or(Complex(0.0, 1.0)));
    const auto Lmax = static_cast<std::size_t>(std::floor(T_len / delta));
    ConjClassResult res;
    res.method = "free: cyclic words up to length " + std::to_string(Lmax);
    std::set<Word> seen;
    Word w;
    const int r = G.rank();
    // Depth-first over reduced words.
    auto visit = [&](auto&& self) -> void {
        if (!w.empty() && is_cyclically_reduced(w)) {
            ++res.candidates;
            Word canon = min_rotation(w);
            if (seen.insert(canon).second) {
                const Isometry g = G.evaluate(canon);
                const double len = g.translation_length();
                if (len <= T_len) {
                    const RootPower rp = primitive_root(canon);
                    ConjClass c;
                    c.word = canon;
                    c.length = len;
                    c.power = rp.power;
                    c.primitive = rp.power == 1;
                    c.shift_count = static_cast<int>(rp.root.size());
                    c.matrix = g;
                    res.classes.push_back(std::move(c));
                }
            }
        }
        if (w.size() >= Lmax) return;
        for (int s = -r; s <= r; ++s) {
            if (s == 0 || (!w.empty() && w.back() == -s)) continue;
            w.push_back(s);
            self(self);
            w.pop_back();
        }
    };
    visit(visit);
    sort_classes(res.classes);
    return res;
}

struct AxisCut {
    bool hit = false;
    double length = 0.0;
    int exit_face = -1;
    bool ambiguous = false;
};

// Boundary points of the axis of g in Klein coordinates: (repelling, attracting).
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> axis_endpoints(const Isometry& g)
{
    const double disc = std::sqrt(std::max(0.0, g.trace() * g.trace() - 4.0));
    const double dm = g.d - g.a;
    const double q = -0.5 * (dm + (dm >= 0.0 ? disc : -disc)); // c xi^2 + (d - a) xi - b = 0
    // xi1 = q / c, xi2 = -b / q; Klein point of real xi: ((xi^2 - 1), 2 xi) / (xi^2 + 1).
    auto from_ratio = [](double num, double den) {
        const double s = num * num + den * den;
        return Eigen::Vector2d((num * num - den * den) / s, 2.0 * num * den / s);
    };
    const Eigen::Vector2d p1 = from_ratio(q, g.c);
    const Eigen::Vector2d p2 = from_ratio(-g.b, q);
    const bool first_attracting = std::abs(q + g.d) > 1.0;
    return first_attracting ? std::make_pair(p2, p1) : std::make_pair(p1, p2);
}

inline AxisCut cut_axis(const DirichletDomain& D, const Isometry& g)
{
    const auto [A, B] = axis_endpoints(g);
    double lo = 0.0, hi = 1.0, second = 2.0;
    int exit_face = -1;
    for (std::size_t f = 0; f < D.faces.size(); ++f) {
        const double fa = DirichletDomain::side(D.faces[f].normal, A);
        const double fb = DirichletDomain::side(D.faces[f].normal, B);
        const double beta = fb - fa;
        if (beta == 0.0) {
            if (fa < 0.0) return {};
            continue;
        }
        const double u = -fa / beta;
        if (beta > 0.0) {
            lo = std::max(lo, u);
        } else if (u < hi) {
            second = hi;
            hi = u;
            exit_face = static_cast<int>(f);
        } else {
            second = std::min(second, u);
        }
    }
    AxisCut cut;
    if (!(hi > lo) || exit_face < 0) return cut;
    const Eigen::Vector2d P = A + lo * (B - A), Q = A + hi * (B - A);
    cut.length = klein_distance(P, Q);
    if (!(cut.length > 1e-9)) return cut;
    cut.hit = true;
    cut.exit_face = exit_face;
    cut.ambiguous = second - hi < 1e-9;
    return cut;
}

inline ConjClassResult surface_conj_classes(const GroupPresentation& G, double T_len, const OrbitOptions& opt)
{
    if (!G.center) throw ConfigError("surface group conjugacy classes need a preset center");
    const Complex c = *G.center;
    // Generic basepoint near the centre so that no closed geodesic passes
    // through a vertex of its Dirichlet domain.
    const Complex x0 = c + Complex(0.0137, 0.0091) * c.imag();
    const DirichletDomain F = dirichlet_domain(G, x0);
    // An axis meeting F passes within radius of x0, so d(x0, g x0) is at most
    // the displacement of a point at that distance from the axis.
    const double reach = 2.0 * std::asinh(std::cosh(F.radius) * std::sinh(0.5 * T_len));
    OrbitOptions o = opt;
    const OrbitResult orb = orbit_enumerate(G, x0, x0, reach + 1e-9, o);

    ConjClassResult res;
    res.method = "surface: cutting sequences through the Dirichlet domain at a generic basepoint";
    ElementSet seen;
    for (const auto& e : orb.entries) {
        const Isometry& w = e.matrix;
        if (!w.is_hyperbolic()) continue;
        const double len = w.translation_length();
        if (len > T_len) continue;
        ++res.candidates;
        if (seen.contains(w)) continue;
        if (!cut_axis(F, w).hit) continue;
        // Follow the geodesic from tile to tile; h accumulates the face pairings.
        Isometry cur = w, h;
        Word hw;
        double total = 0.0;
        int segments = 0;
        bool ambiguous = false, closed = false;
        std::vector<Isometry> conjugates;
        for (int step = 0; step < 100000; ++step) {
            const AxisCut cut = cut_axis(F, cur);
            if (!cut.hit) {
                ambiguous = true;
                break;
            }
            ambiguous = ambiguous || cut.ambiguous;
            conjugates.push_back(cur);
            total += cut.length;
            ++segments;
            const DirichletFace& face = F.faces[static_cast<std::size_t>(cut.exit_face)];
            cur = face.g.inverse() * cur * face.g;
            h = h * face.g;
            hw.insert(hw.end(), face.word.begin(), face.word.end());
            const double scale = std::max({1.0, cur.max_abs(), w.max_abs()});
            if (max_abs_difference(cur, w) <= 1e-8 * scale) {
                closed = true;
                break;
            }
        }
        for (const auto& g : conjugates) seen.insert(g);
        const double kf = len / total;
        const int k = static_cast<int>(std::lround(kf));
        if (!closed || ambiguous || k < 1 || std::abs(kf - k) > 1e-6 || std::abs(h.translation_length() - total) > 1e-6 * (1.0 + total)) {
            ++res.flagged;
            continue;
        }
        const Word root = cyclic_reduce(hw);
        Word full;
        for (int i = 0; i < k; ++i) full.insert(full.end(), root.begin(), root.end());
        ConjClass cc;
        cc.word = min_rotation(cyclic_reduce(full));
        cc.length = len;
        cc.power = k;
        cc.primitive = k == 1;
        cc.shift_count = segments;
        cc.matrix = w;
        res.classes.push_back(std::move(cc));
    }
    sort_classes(res.classes);
    return res;
}

} // namespace detail

inline ConjClassResult conj_classes(const GroupPresentation& G, double T_len, const OrbitOptions& opt = {})
{
    if (!(T_len > 0.0)) throw DomainError("conj_classes: T_len must be positive");
    return G.kind == GroupKind::free ? detail::free_conj_classes(G, T_len) : detail::surface_conj_classes(G, T_len, opt);
}

// Sum of l exp(-(n-1) K l / 2) over primitive classes with l <= T.
inline double geodesic_sum(const std::vector<ConjClass>& classes, double T, double K = 1.0, int n = 2, bool weight_by_shifts = false)
{
    double s = 0.0;
    for (const auto& c : classes) {
        if (!c.primitive || c.length > T) continue;
        const double w = weight_by_shifts ? static_cast<double>(c.shift_count) : 1.0;
        s += w * c.length * std::exp(-0.5 * srb_Z(c.length, K, n));
    }
    return s;
}

// Geodesic sum and primitive-class count on a T grid. The count is fitted in
// the form log(count * T) against T, matching e^{hT}/(hT) growth.
inline GrowthReport geodesic_growth(const std::vector<ConjClass>& classes, const std::vector<double>& Tgrid, double K = 1.0, int n = 2)
{
    std::vector<double> cnt, val;
    for (double T : Tgrid) {
        double c = 0.0;
        for (const auto& cl : classes)
            if (cl.primitive && cl.length <= T) c += 1.0;
        cnt.push_back(c);
        val.push_back(geodesic_sum(classes, T, K, n));
    }
    return detail::growth_fit(Tgrid, cnt, val, true);
}

// ---------------------------------------------------------------------------
// Presets built from closed forms

// Hyperbolic element of translation length l whose axis passes through i,
// rotated by theta in the disk model.
inline Isometry axis_through_i(double l, double theta)
{
    const double ch = std::cosh(0.5 * l), sh = std::sinh(0.5 * l);
    // C [[ch, sh e^{i theta}], [sh e^{-i theta}, ch]] C^{-1}, C = [[i, i], [-1, 1]].
    const double cs = std::cos(theta), sn = std::sin(theta);
    return Isometry::make(ch + sh * cs, -sh * sn, -sh * sn, ch - sh * cs);
}

// Regular-octagon genus-2 surface group, relation a1 a2^-1 a3 a4^-1 a1^-1 a2 a3^-1 a4.
inline GroupPresentation octagon_group()
{
    GroupPresentation G;
    G.name = "octagon";
    G.kind = GroupKind::surface;
    const double l = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    for (int k = 0; k < 4; ++k) G.generators.push_back(axis_through_i(l, k * pi / 4.0));
    G.relation = Word{1, -2, 3, -4, -1, 2, -3, 4};
    G.min_translation = l;
    G.center = Complex(0.0, 1.0);
    G.validate();
    return G;
}

// Two-generator Schottky group with orthogonal axes through i.
inline GroupPresentation schottky_group(double a = 1.5)
{
    GroupPresentation G;
    G.name = "schottky";
    G.kind = GroupKind::free;
    G.generators = {axis_through_i(2.0 * a, 0.0), axis_through_i(2.0 * a, pi / 2.0)};
    G.min_translation = 2.0 * a;
    G.center = Complex(0.0, 1.0);
    G.validate();
    return G;
}

} // namespace weyllab
