#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <weyllab/diophantine.hpp>

using namespace weyllab;

namespace {

double grid_first_witness(const std::vector<double>& radii, double lo, double hi, double target, double step)
{
    for (double l = lo; l <= hi; l += step) {
        double q = 0.0;
        for (double r : radii) q = std::max(q, std::abs(std::polar(1.0, l * r) - 1.0));
        if (q < target) return l;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace

TEST(BoxSearch, SingleFrequency)
{
    AlignmentProblem p;
    p.radii = {1.0};
    p.Y = 10.0;
    p.M1 = 1.0;
    const auto r = box_search(p);
    ASSERT_TRUE(r.success);
    EXPECT_LT(box_quality(p.radii, r.value), 0.1);
    EXPECT_NEAR(r.value, two_pi, 0.1);
    EXPECT_NEAR(box_quality({1.0}, two_pi), 0.0, 1e-15);
}

TEST(BoxSearch, TwoRadiiAgainstDenseGrid)
{
    AlignmentProblem p;
    p.radii = {1.0, std::sqrt(2.0)};
    p.quality = 0.3;
    p.interval_hi = 100.0;
    const auto r = box_search(p);
    ASSERT_TRUE(r.success);
    EXPECT_LT(box_quality(p.radii, r.value), 0.3);
    EXPECT_NEAR(box_quality(p.radii, 24.0 * pi), 0.1845, 5e-4);
    const double first = grid_first_witness(p.radii, p.M1, 100.0, 0.3, 1e-3);
    // The result lies in the first sublevel component found by the grid.
    ASSERT_GE(r.value, first - 1e-3);
    for (double l = first; l <= r.value; l += 1e-4) EXPECT_LT(box_quality(p.radii, l), 0.3) << l;
    EXPECT_LE(r.value, 24.0 * pi);
}

TEST(BoxSearch, ResultIsReverified)
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> U(1.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        AlignmentProblem p;
        for (int j = 0; j < 1 + trial % 3; ++j) p.radii.push_back(U(rng));
        p.Y = 5.0;
        p.budget = 2'000'000;
        const auto r = box_search(p);
        EXPECT_DOUBLE_EQ(r.quality, box_quality(p.radii, r.value));
        EXPECT_EQ(r.success, r.quality < p.target());
    }
}

TEST(BoxSearch, ScaleCovariance)
{
    AlignmentProblem p;
    p.radii = {1.0, std::sqrt(2.0), std::sqrt(3.0)};
    p.Y = 4.0;
    p.interval_hi = 400.0;
    const auto r = box_search(p);
    ASSERT_TRUE(r.success);
    for (double c : {0.5, 3.0, 7.25}) {
        AlignmentProblem q = p;
        for (double& x : q.radii) x *= c;
        q.M1 = p.M1 / c;
        q.interval_hi = *p.interval_hi / c;
        const auto s = box_search(q);
        ASSERT_TRUE(s.success);
        EXPECT_NEAR(s.value * c, r.value, 1e-6 * r.value);
        EXPECT_NEAR(box_quality(p.radii, s.value * c), s.quality, 1e-9);
    }
}

TEST(BoxSearch, Deterministic)
{
    AlignmentProblem p;
    p.radii = {1.3, 2.9, 3.7};
    p.Y = 6.0;
    const auto a = box_search(p), b = box_search(p);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(BoxSearch, BudgetAndValidation)
{
    AlignmentProblem p;
    p.radii = {1.0, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0)};
    p.Y = 50.0;
    p.budget = 100;
    const auto r = box_search(p);
    EXPECT_FALSE(r.success);
    EXPECT_LE(r.evaluations, 200u);
    AlignmentProblem bad;
    bad.radii = {1.0, -2.0};
    EXPECT_THROW(box_search(bad), DomainError);
    bad.radii = {1.0, 1.0};
    EXPECT_THROW(box_search(bad), DomainError);
    bad.radii = {};
    EXPECT_THROW(box_search(bad), DomainError);
}

TEST(AlignIntervals, ThreeRadii)
{
    const std::vector<double> radii{50, 80, 100}, b{0, 0, 0};
    const auto r = align_intervals(radii, b, 100.0, 2.0, 2.0);
    ASSERT_TRUE(r.success);
    const double P1 = 0.01 / 50.0, P2 = (pi - 0.01) / 100.0;
    EXPECT_NEAR(P2, 0.031316, 1e-6);
    EXPECT_NEAR(r.value, 0.5 * (P1 + P2), 1e-15);
    EXPECT_NEAR(r.value, 0.015758, 1e-6);
    double m = 1.0;
    for (double x : radii) m = std::min(m, std::sin(r.value * x));
    EXPECT_GE(m, 0.005);
    EXPECT_DOUBLE_EQ(r.quality, m);
}

TEST(AlignIntervals, SingleRadiusMidpoint)
{
    const auto r = align_intervals({10.0}, {0.0}, 10.0, 1.0, 1.5);
    ASSERT_TRUE(r.success);
    EXPECT_NEAR(r.value * 10.0, 0.5 * pi, 1e-12);
}

TEST(AlignIntervals, Preconditions)
{
    EXPECT_THROW(align_intervals({50.0}, {0.0}, 100.0, 2.0, 1.0), DomainError);
    EXPECT_THROW(align_intervals({20.0}, {0.0}, 100.0, 2.0, 2.0), DomainError);
    EXPECT_THROW(align_intervals({60.0}, {0.9}, 100.0, 2.0, 2.0), DomainError);
}

TEST(AlignIntervals, PropertyMembershipAndMonotonicity)
{
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 300; ++trial) {
        const double T = 20.0 + 200.0 * std::uniform_real_distribution<double>(0, 1)(rng);
        const double A = 1.0 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
        const double Y = 3.0 * A / pi * 1.05;
        std::uniform_real_distribution<double> R(T / A, T), B(-1.0 / Y, 1.0 / Y);
        std::vector<double> radii, b;
        for (int j = 0; j < 1 + trial % 6; ++j) {
            radii.push_back(R(rng));
            b.push_back(B(rng));
        }
        const auto r = align_intervals(radii, b, T, A, Y);
        ASSERT_TRUE(r.success) << trial;
        EXPECT_GE(r.value, 0.0);
        EXPECT_LE(r.value, 1.0);
        for (std::size_t j = 0; j < radii.size(); ++j) {
            EXPECT_GE(r.value * radii[j] + b[j], 1.0 / T - 1e-12);
            EXPECT_LE(r.value * radii[j] + b[j], pi - 1.0 / T + 1e-12);
            EXPECT_GE(std::sin(r.value * radii[j] + b[j]), 1.0 / (2.0 * T));
        }
        std::vector<double> r2 = radii;
        for (double& x : r2) x *= 2.0;
        EXPECT_TRUE(align_intervals(r2, b, 2.0 * T, A, Y).success);
    }
}

TEST(SignAlignment, EvenDimensionSingleRadius)
{
    const auto r = sign_alignment({1.0}, 2, 1.0);
    ASSERT_TRUE(r.success);
    EXPECT_NEAR(std::remainder(r.value, two_pi), 0.0, 0.1);
    EXPECT_NEAR(std::sin(r.value + pi / 4.0), std::sin(pi / 4.0), 0.1);
}

TEST(SignAlignment, DimensionThreeTwoStages)
{
    const double T = 10.0;
    const std::vector<double> radii{4.0, 6.3, 8.1, 9.7};
    const auto r = sign_alignment(radii, 3, T);
    ASSERT_TRUE(r.success) << r.stage;
    EXPECT_EQ(r.stage, "stage1+stage2");
    for (double x : radii) EXPECT_GE(std::sin(r.value * x), 1.0 / (2.0 * T));
    EXPECT_NEAR(leading_phase(3), 0.0, 1e-15);
    EXPECT_NEAR(leading_phase(5), pi / 2.0, 1e-15);
}
