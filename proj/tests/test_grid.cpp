#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nheat/grid.hpp"

using namespace nheat;

namespace {

Field1D random_field(const Grid1D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(g.J()));
    for (auto& x : v) x = U(rng);
    return Field1D(g, v);
}

// Plain naive oracle for the normalized inner product.
double naive_inner(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += static_cast<long double>(a[j]) * b[j];
    return static_cast<double>(s / a.size());
}

}  // namespace

TEST(Grid1D, SpacingAndNodes) {
    for (long J : {2L, 3L, 10L, 257L}) {
        for (double L : {1.0, 2.0, 0.3}) {
            const Grid1D g(J, L);
            EXPECT_NEAR(g.dx() * static_cast<double>(J - 1), L, 1e-15 * L);
            EXPECT_EQ(g.node(0), 0.0);
            EXPECT_EQ(g.node(J - 1), L);
            for (long j = 0; j < J; ++j) EXPECT_NEAR(g.node(j), static_cast<double>(j) * g.dx(), 1e-15 * L);
        }
    }
}

TEST(Grid1D, RejectsBadArguments) {
    EXPECT_THROW(Grid1D(1, 1.0), ContractError);
    EXPECT_THROW(Grid1D(5, 0.0), ContractError);
    EXPECT_THROW(Grid1D(5, -1.0), ContractError);
    EXPECT_THROW((void)Grid1D(5, 1.0).node(5), ContractError);
}

TEST(Field1D, Invariants) {
    const Grid1D g(4, 1.0);
    EXPECT_THROW(Field1D(g, std::vector<double>{1, 2, 3}), ContractError);
    EXPECT_THROW(Field1D(g, std::vector<double>{1, 2, std::nan(""), 4}), ContractError);
    EXPECT_THROW(Field1D(g, std::vector<double>{1, 2, INFINITY, 4}), ContractError);
    EXPECT_EQ(Field1D(g).size(), 4u);
}

TEST(Inner, Examples) {
    const Grid1D g(4, 1.0);
    EXPECT_DOUBLE_EQ(inner(Field1D::ones(g), Field1D::ones(g)), 1.0);
    EXPECT_DOUBLE_EQ(inner(Field1D::unit(g, 0), Field1D::ones(g)), 0.25);
}

TEST(Inner, CosineModesOrthogonalByDirectSummation) {
    // Oracle: sum sqrt(2) cos(l (j+1/2) pi / J) products by hand.
    const long J = 8;
    const Grid1D g(J, 1.0);
    std::vector<double> w1(J), w2(J);
    for (long j = 0; j < J; ++j) {
        w1[j] = std::sqrt(2.0) * std::cos(1.0 * (j + 0.5) * std::numbers::pi / J);
        w2[j] = std::sqrt(2.0) * std::cos(2.0 * (j + 0.5) * std::numbers::pi / J);
    }
    EXPECT_NEAR(inner(Field1D(g, w1), Field1D(g, w2)), 0.0, 1e-12);
    EXPECT_NEAR(mean(Field1D(g, w1)), 0.0, 1e-12);
    EXPECT_NEAR(norm_l2(Field1D(g, w1)), 1.0, 1e-12);
}

TEST(Inner, GridMismatchThrows) {
    EXPECT_THROW((void)inner(Field1D(Grid1D(4, 1.0)), Field1D(Grid1D(5, 1.0))), ContractError);
    EXPECT_THROW((void)inner(Field1D(Grid1D(4, 1.0)), Field1D(Grid1D(4, 2.0))), ContractError);
}

TEST(Mean, Examples) {
    EXPECT_DOUBLE_EQ(mean(Field1D::ones(Grid1D(7, 1.0))), 1.0);
    EXPECT_DOUBLE_EQ(mean(Field1D::unit(Grid1D(10, 1.0), 0)), 0.1);
}

TEST(Norm, Examples) {
    const Grid1D g(9, 1.0);
    EXPECT_DOUBLE_EQ(norm_l2(Field1D::ones(g)), 1.0);
    EXPECT_DOUBLE_EQ(norm_l2(Field1D(g, 2.0)), 2.0);
    EXPECT_EQ(norm_l2(Field1D(g)), 0.0);
}

TEST(Project, Examples) {
    const Grid1D g3(3, 1.0);
    const Field1D x = project(g3, [](double s) { return s; });
    EXPECT_EQ(x[0], 0.0);
    EXPECT_EQ(x[1], 0.5);
    EXPECT_EQ(x[2], 1.0);
    const Field1D one = project(Grid1D(5, 2.0), [](double) { return 1.0; });
    for (double v : one.values()) EXPECT_EQ(v, 1.0);
    const Field1D c1 = project(Grid1D(2, 1.0), [](double s) { return std::sqrt(2.0) * std::cos(std::numbers::pi * s); });
    EXPECT_NEAR(c1[0], std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(c1[1], -std::sqrt(2.0), 1e-15);
}

TEST(Properties, CauchySchwarzAndAgreementWithNaiveSum) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Grid1D g(2 + trial % 60, 1.0 + trial % 3);
        const Field1D v = random_field(g, rng), w = random_field(g, rng);
        EXPECT_LE(std::fabs(inner(v, w)), norm_l2(v) * norm_l2(w) * (1 + 1e-15));
        EXPECT_NEAR(inner(v, w), naive_inner(v.vector(), w.vector()), 1e-15);
        EXPECT_EQ(mean(v), inner(v, Field1D::ones(g)));
    }
}

TEST(Properties, ProjectIsLinear) {
    const Grid1D g(33, 2.0);
    auto f = [](double x) { return std::sin(3 * x) + x * x; };
    auto h = [](double x) { return std::exp(-x); };
    const double a = 1.7, b = -0.3;
    const Field1D lhs = project(g, [&](double x) { return a * f(x) + b * h(x); });
    const Field1D rhs = a * project(g, f) + b * project(g, h);
    for (std::size_t j = 0; j < lhs.size(); ++j) EXPECT_NEAR(lhs[j], rhs[j], 1e-14);
}

TEST(Properties, ResultsAreDeterministic) {
    std::mt19937_64 rng(99);
    const Grid1D g(1000, 1.0);
    const Field1D v = random_field(g, rng), w = random_field(g, rng);
    EXPECT_EQ(inner(v, w), inner(v, w));
    EXPECT_EQ(mean(v), mean(Field1D(g, v.vector())));
}

TEST(CompensatedSum, RecoversCancelledTerms) {
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    EXPECT_EQ(s.value(), 2.0);
}

TEST(Grid2D, LatticeAndIsotropicMapping) {
    const Grid2D g(5, 7, 2.0, 4.0);
    EXPECT_NEAR(g.dx() * 4, 2.0, 1e-15);
    EXPECT_NEAR(g.dy() * 6, 4.0, 1e-15);
    EXPECT_EQ(g.size(), 35u);
    EXPECT_EQ(g.index(1, 0), 1u);
    EXPECT_EQ(g.index(0, 1), 5u);
    const Grid2D iso = Grid2D::isotropic(32, 2.0, 4.0);
    EXPECT_EQ(iso.Jx(), 32);
    EXPECT_EQ(iso.Jy(), 63);
    EXPECT_NEAR(iso.dx(), iso.dy(), 1e-15);
}

TEST(Field2D, NormsAndProjection) {
    const Grid2D g(4, 6, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(mean2d(Field2D(g, 1.0)), 1.0);
    EXPECT_DOUBLE_EQ(norm2d(Field2D(g, 3.0)), 3.0);
    const Field2D p = project2d(g, [](double x, double y) { return x + 10 * y; });
    EXPECT_DOUBLE_EQ(p(3, 0), 1.0);
    EXPECT_DOUBLE_EQ(p(0, 5), 20.0);
    Field2D e(g);
    e(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(inner2d(e, Field2D(g, 1.0)), 1.0 / 24.0);
    EXPECT_THROW(Field2D(g, std::vector<double>(23, 0.0)), ContractError);
}
