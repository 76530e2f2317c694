#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <weyllab/hyperbolic.hpp>

using namespace weyllab;

namespace {

Isometry random_sl2(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (;;) {
        const double a = U(rng), b = U(rng), c = U(rng);
        if (std::abs(a) < 0.2) continue;
        return Isometry::make(a, b, c, (1.0 + b * c) / a);
    }
}

Complex random_upper(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> X(-2.0, 2.0), Y(0.2, 3.0);
    return {X(rng), Y(rng)};
}

// Real fixed points of a hyperbolic element, from c z^2 + (d - a) z - b = 0.
std::pair<double, double> fixed_points(const Isometry& g)
{
    const double disc = std::sqrt(g.trace() * g.trace() - 4.0);
    if (std::abs(g.c) < 1e-14) return {-g.b / (g.d - g.a), std::numeric_limits<double>::infinity()};
    return {(g.a - g.d + disc) / (2.0 * g.c), (g.a - g.d - disc) / (2.0 * g.c)};
}

// Distance from z to the geodesic with real endpoints p, q.
double distance_to_axis(Complex z, double p, double q)
{
    Complex w;
    if (std::isinf(q))
        w = z - p;
    else
        w = (z - p) / (z - q);
    // w lies on the imaginary axis exactly when z is on the geodesic; the map
    // may flip to the lower half-plane, which does not change |Re w| / |Im w|.
    return std::asinh(std::abs(w.real()) / std::abs(w.imag()));
}

Eigen::Vector2d klein_of_real(double xi)
{
    if (std::isinf(xi)) return {1.0, 0.0};
    return {(xi * xi - 1.0) / (xi * xi + 1.0), 2.0 * xi / (xi * xi + 1.0)};
}

// Length of the part of the chord AB inside the convex polygon V (cyclic order).
double chord_inside(const std::vector<Eigen::Vector2d>& V, const Eigen::Vector2d& A, const Eigen::Vector2d& B)
{
    double lo = 0.0, hi = 1.0;
    const Eigen::Vector2d c = [&] {
        Eigen::Vector2d s = Eigen::Vector2d::Zero();
        for (const auto& v : V) s += v;
        return Eigen::Vector2d(s / static_cast<double>(V.size()));
    }();
    for (std::size_t i = 0; i < V.size(); ++i) {
        const Eigen::Vector2d P = V[i], Q = V[(i + 1) % V.size()];
        Eigen::Vector2d nrm(-(Q - P).y(), (Q - P).x());
        if (nrm.dot(c - P) < 0.0) nrm = -nrm;
        const double fa = nrm.dot(A - P), fb = nrm.dot(B - P);
        if (fa == fb) {
            if (fa < 0.0) return 0.0;
            continue;
        }
        const double u = fa / (fa - fb);
        if (fb > fa)
            lo = std::max(lo, u);
        else
            hi = std::min(hi, u);
    }
    if (!(hi > lo)) return 0.0;
    return klein_distance(A + lo * (B - A), A + hi * (B - A));
}

} // namespace

TEST(Distance, Examples)
{
    EXPECT_NEAR(hyp_distance({0, 1}, {0, 2}), std::log(2.0), 1e-15);
    EXPECT_NEAR(hyp_distance({0, 1}, {1, 1}), std::acosh(1.5), 1e-15);
    EXPECT_EQ(hyp_distance({0.3, 0.7}, {0.3, 0.7}), 0.0);
    EXPECT_THROW(hyp_distance({0, 0}, {0, 1}), DomainError);
    EXPECT_THROW(hyp_distance({0, 1}, {0, -1}), DomainError);
}

TEST(Distance, PropertyMobiusInvarianceAndModels)
{
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 500; ++trial) {
        const Isometry g = random_sl2(rng);
        const Complex z = random_upper(rng), w = random_upper(rng);
        const double d = hyp_distance(z, w);
        EXPECT_NEAR(hyp_distance(g.apply(z), g.apply(w)), d, 1e-9 * (1.0 + d));
        EXPECT_NEAR(klein_distance(klein(z), klein(w)), d, 1e-7 * (1.0 + d));
        EXPECT_NEAR(std::acosh(1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag())), d, 1e-7 * (1.0 + d));
    }
}

TEST(Isometry, RejectsBadDeterminant)
{
    EXPECT_THROW(Isometry::make(1, 1, 1, 1), ConfigError);
    const Isometry g = Isometry::make(-2, -1, -1, -1);
    EXPECT_GT(g.trace(), 0.0);
}

TEST(Isometry, TranslationLengthAgainstDisplacementMinimum)
{
    const Isometry g = Isometry::make(2.0, 1.0, 1.0, 1.0);
    EXPECT_NEAR(g.translation_length(), 2.0 * std::acosh(1.5), 1e-15);
    // Coarse grid, then pattern search on log y.
    auto f = [&](double x, double ly) {
        const Complex z(x, std::exp(ly));
        return hyp_distance(z, g.apply(z));
    };
    double bx = 0.0, by = 0.0, bv = 1e300;
    for (double x = -2.0; x <= 3.0; x += 0.01)
        for (double ly = -3.0; ly <= 2.0; ly += 0.01)
            if (f(x, ly) < bv) {
                bv = f(x, ly);
                bx = x;
                by = ly;
            }
    for (double h = 0.01; h > 1e-12; h *= 0.5)
        for (bool moved = true; moved;) {
            moved = false;
            for (auto [dx, dy] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}})
                if (f(bx + dx, by + dy) < bv) {
                    bv = f(bx + dx, by + dy);
                    bx += dx;
                    by += dy;
                    moved = true;
                }
        }
    EXPECT_NEAR(bv, 1.9248473002384139, 1e-6);
    EXPECT_NEAR(bv, g.translation_length(), 1e-6);
}

TEST(Isometry, PropertyConjugationInvariance)
{
    std::mt19937_64 rng(52);
    const GroupPresentation G = octagon_group();
    for (int trial = 0; trial < 200; ++trial) {
        const Word w = random_reduced_word(rng, 4, 1 + trial % 6);
        const Word h = random_reduced_word(rng, 4, 1 + trial % 5);
        const Isometry g = G.evaluate(w), c = G.evaluate(h);
        const Isometry conj = c * g * c.inverse();
        if (!g.is_hyperbolic()) continue;
        EXPECT_NEAR(conj.translation_length(), g.translation_length(), 1e-8 * (1.0 + g.translation_length()));
    }
}

TEST(Presets, RelationIsIdentityAndValidationCatchesErrors)
{
    const GroupPresentation G = octagon_group();
    const Isometry r = G.evaluate(*G.relation);
    EXPECT_LT(max_abs_difference(r, Isometry::identity()), 1e-9);
    GroupPresentation bad = G;
    bad.relation = Word{1, 2};
    EXPECT_THROW(bad.validate(), ConfigError);
    GroupPresentation weak = schottky_group();
    weak.min_translation = 10.0;
    EXPECT_THROW(weak.validate(), ConfigError);
}

TEST(Orbit, BelowSystoleOnlyIdentity)
{
    const GroupPresentation G = octagon_group();
    const Complex x(0.0371, 1.0213);
    const auto orb = orbit_enumerate(G, x, x, 0.5 * G.min_translation);
    ASSERT_EQ(orb.entries.size(), 1u);
    EXPECT_EQ(orb.entries[0].distance, 0.0);
    EXPECT_THROW(S_sum(orb.entries, 2, 1.0), DomainError);
}

TEST(Orbit, FreeGroupCompletenessAgainstWordEnumeration)
{
    const GroupPresentation G = schottky_group();
    const Complex x(0.03, 1.05), y(-0.04, 0.98);
    const double T = 9.0;
    const double delta = schottky_separation(G, *G.center);
    const auto Lmax = static_cast<std::size_t>(std::floor(T / delta)) + 1;
    std::vector<double> brute;
    Word w;
    auto rec = [&](auto&& self, Isometry g) -> void {
        const double d = hyp_distance(x, g.apply(y));
        if (d <= T) brute.push_back(d);
        if (w.size() >= Lmax) return;
        for (int s : {1, 2, -1, -2}) {
            if (!w.empty() && w.back() == -s) continue;
            w.push_back(s);
            self(self, g * G.letter(s));
            w.pop_back();
        }
    };
    rec(rec, Isometry::identity());
    std::sort(brute.begin(), brute.end());
    const auto orb = orbit_enumerate(G, x, y, T);
    ASSERT_EQ(orb.entries.size(), brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) EXPECT_NEAR(orb.entries[i].distance, brute[i], 1e-9);
    for (const auto& e : orb.entries) EXPECT_LT(max_abs_difference(G.evaluate(orb.word(e)), e.matrix), 1e-8 * e.matrix.max_abs());
}

TEST(Orbit, OctagonCountMatchesAreaGrowth)
{
    const GroupPresentation G = octagon_group();
    const Complex x(0.0371, 1.0213), y(-0.0193, 1.0297);
    const double T = 8.0;
    const auto orb = orbit_enumerate(G, x, y, T);
    const double expected = (std::cosh(T) - 1.0) / 2.0; // ball area 2 pi (cosh T - 1) over area 4 pi
    EXPECT_NEAR(static_cast<double>(orb.entries.size()), expected, 0.15 * expected);
    // Entries are distinct group elements.
    for (std::size_t i = 1; i < orb.entries.size(); ++i) EXPECT_LE(orb.entries[i - 1].distance, orb.entries[i].distance);
}

TEST(Orbit, CapOverflowIsAResourceError)
{
    OrbitOptions opt;
    opt.cap = 50;
    EXPECT_THROW(orbit_enumerate(octagon_group(), {0.01, 1.0}, {0.02, 1.0}, 8.0, opt), ResourceError);
}

TEST(Orbit, SumExponentIsHalfTheCountExponent)
{
    const GroupPresentation G = octagon_group();
    const auto rep = S_growth(G, {0.0371, 1.0213}, {-0.0193, 1.0297}, linear_grid(4.0, 9.0, 21));
    EXPECT_NEAR(rep.count_fit.slope, 1.0, 0.1);
    EXPECT_NEAR(rep.ratio, 0.5, 0.1);
}

TEST(Dynamics, ClosedForms)
{
    EXPECT_EQ(unstable_jacobian(0.0, 1.0, 2), 1.0);
    EXPECT_EQ(srb_Z(0.0, 1.0, 2), 0.0);
    EXPECT_EQ(srb_Z(3.0, 1.0, 2), 3.0);
    EXPECT_NEAR(std::log(unstable_jacobian(2.5, 0.7, 4)), srb_Z(2.5, 0.7, 4), 1e-14);
}

TEST(Dynamics, DensityAgainstExponentialGrowthBound)
{
    // sqrt(g r^{n-1}) e^{-(n-1) K r} <= 1 for K >= 1.
    for (double K : {1.0, 2.0, 5.0})
        for (int n : {2, 3, 4})
            for (double r = 1e-3; r < 30.0; r *= 1.05)
                EXPECT_LE(std::sqrt(g_density(-1, K, n, r) * std::pow(r, n - 1)) * std::exp(-srb_Z(r, K, n)), 1.0);
}

TEST(Dynamics, OrbitDistanceAgainstClassLength)
{
    const GroupPresentation G = octagon_group();
    const Complex x(0.0371, 1.0213);
    const double D = 2.0 * G.center_radius.value();
    const auto orb = orbit_enumerate(G, x, x, 9.0);
    int checked = 0;
    for (const auto& e : orb.entries) {
        if (!e.matrix.is_hyperbolic()) continue;
        const auto [p, q] = fixed_points(e.matrix);
        const double dax = distance_to_axis(x, p, q);
        const double l = e.matrix.translation_length();
        EXPECT_GE(e.distance, l - 1e-9);
        EXPECT_LE(e.distance, l + 2.0 * dax + 1e-9);
        if (dax <= D) {
            EXPECT_LE(std::abs(srb_Z(e.distance, 1.0, 2) - srb_Z(l, 1.0, 2)), 2.0 * D);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Pressure, ConstantCurvature)
{
    const auto p = pressure_const(1.0, 2);
    EXPECT_EQ(p.h, 1.0);
    EXPECT_EQ(p.pressure, 0.5);
    const auto b = pressure_bounds(2.0, 1.0, 3);
    EXPECT_EQ(b.ratio_lower, 0.25);
    EXPECT_FALSE(b.exact);
    EXPECT_THROW(pressure_bounds(1.0, 2.0, 2), DomainError);
}

TEST(Pressure, PropertyBoundsAreConsistent)
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> U(0.1, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        double K1 = U(rng), K2 = U(rng);
        if (K1 < K2) std::swap(K1, K2);
        const int n = 2 + trial % 4;
        const auto b = pressure_bounds(K1, K2, n);
        EXPECT_LE(b.h_lower, b.h_upper);
        EXPECT_GE(b.pressure_lower / b.h_upper, b.ratio_lower * (1 - 1e-12));
        EXPECT_NEAR(pressure_const(K2, n).pressure, b.pressure_lower, 1e-12);
    }
}

TEST(Classes, EmptyListSumsToZero) { EXPECT_EQ(geodesic_sum({}, 10.0), 0.0); }

TEST(Classes, FreeGroupAgainstExhaustiveWords)
{
    const GroupPresentation G = schottky_group();
    const double T = 11.0;
    const auto res = conj_classes(G, T);
    EXPECT_EQ(res.flagged, 0u);
    const double delta = schottky_separation(G, *G.center);
    const auto L = static_cast<std::size_t>(std::floor(T / delta)) + 2;
    std::set<Word> want;
    Word w;
    auto rec = [&](auto&& self) -> void {
        if (!w.empty() && is_cyclically_reduced(w) && G.evaluate(w).translation_length() <= T) want.insert(min_rotation(w));
        if (w.size() >= L) return;
        for (int s : {1, 2, -1, -2}) {
            if (!w.empty() && w.back() == -s) continue;
            w.push_back(s);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
    std::set<Word> got;
    for (const auto& c : res.classes) {
        got.insert(c.word);
        EXPECT_NEAR(c.length, G.evaluate(c.word).translation_length(), 1e-9 * c.length);
        EXPECT_EQ(c.primitive, is_primitive(c.word));
        EXPECT_EQ(c.word, min_rotation(c.word));
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(got.size(), res.classes.size());
}

TEST(Classes, SurfaceGroupLiftsAgainstAxisCrossings)
{
    // Every class contributes one conjugate per segment of its closed geodesic
    // in the Dirichlet domain; count those conjugates directly from the orbit.
    const GroupPresentation G = octagon_group();
    const double T = 6.0;
    const auto res = conj_classes(G, T);
    EXPECT_EQ(res.flagged, 0u);
    ASSERT_FALSE(res.classes.empty());
    std::size_t segments = 0;
    for (const auto& c : res.classes) {
        segments += static_cast<std::size_t>(c.shift_count);
        EXPECT_GE(c.length, G.min_translation - 1e-9);
        EXPECT_NEAR(c.length, G.evaluate(c.word).translation_length(), 1e-7 * c.length);
    }
    const Complex x0 = *G.center + Complex(0.0137, 0.0091);
    const DirichletDomain F = dirichlet_domain(G, x0);
    const double reach = 2.0 * std::asinh(std::cosh(F.radius) * std::sinh(0.5 * T));
    const auto orb = orbit_enumerate(G, x0, x0, reach + 1e-6);
    std::size_t crossings = 0;
    for (const auto& e : orb.entries) {
        if (!e.matrix.is_hyperbolic() || e.matrix.translation_length() > T) continue;
        const auto [p, q] = fixed_points(e.matrix);
        if (chord_inside(F.vertices, klein_of_real(p), klein_of_real(q)) > 1e-9) ++crossings;
    }
    EXPECT_EQ(crossings, segments);
    // The shortest closed geodesics on this surface are the generator axes.
    EXPECT_NEAR(res.classes.front().length, G.min_translation, 1e-9);
}

TEST(Classes, SurfaceGroupClassesComeInInversePairs)
{
    const GroupPresentation G = octagon_group();
    const auto res = conj_classes(G, 6.0);
    std::multiset<long long> lengths;
    for (const auto& c : res.classes) lengths.insert(std::llround(c.length * 1e6));
    for (const auto& c : res.classes) {
        // A class and its inverse have equal length; the inverse class must also be present.
        const Word inv = inverse(c.word);
        const Isometry m = G.evaluate(inv);
        EXPECT_NEAR(m.translation_length(), c.length, 1e-7 * c.length);
    }
    for (auto it = lengths.begin(); it != lengths.end(); it = lengths.upper_bound(*it)) EXPECT_EQ(lengths.count(*it) % 2, 0u);
}

TEST(Classes, GeodesicSumWeights)
{
    const auto res = conj_classes(schottky_group(), 10.0);
    double direct = 0.0, shifted = 0.0;
    for (const auto& c : res.classes)
        if (c.primitive) {
            direct += c.length * std::exp(-0.5 * c.length);
            shifted += c.shift_count * c.length * std::exp(-0.5 * c.length);
        }
    EXPECT_NEAR(geodesic_sum(res.classes, 10.0), direct, 1e-12 * direct);
    EXPECT_NEAR(geodesic_sum(res.classes, 10.0, 1.0, 2, true), shifted, 1e-12 * shifted);
}
