#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nheat/spectral.hpp"

using namespace nheat;

namespace {

Field1D random_field(const Grid1D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(g.J()));
    for (auto& x : v) x = U(rng);
    return Field1D(g, v);
}

// Dense oracle for P applied to v: tridiagonal matrix assembled entry by entry.
std::vector<double> dense_apply(long J, double dx, const std::vector<double>& v) {
    std::vector<std::vector<double>> P(J, std::vector<double>(J, 0.0));
    for (long i = 0; i < J; ++i) {
        if (i > 0) {
            P[i][i - 1] += 1;
            P[i][i] -= 1;
        }
        if (i + 1 < J) {
            P[i][i + 1] += 1;
            P[i][i] -= 1;
        }
    }
    std::vector<double> out(J, 0.0);
    for (long i = 0; i < J; ++i)
        for (long j = 0; j < J; ++j) out[i] += P[i][j] * v[j] / (dx * dx);
    return out;
}

}  // namespace

TEST(Apply, Examples) {
    const Grid1D g(3, 1.0);
    const Field1D r = NeumannLaplacian1D(g).apply(Field1D::unit(g, 0));
    EXPECT_DOUBLE_EQ(r[0], -4.0);
    EXPECT_DOUBLE_EQ(r[1], 4.0);
    EXPECT_DOUBLE_EQ(r[2], 0.0);
    for (double x : NeumannLaplacian1D(Grid1D(17, 2.0)).apply(Field1D::ones(Grid1D(17, 2.0))).values()) EXPECT_EQ(x, 0.0);
}

TEST(Apply, MatchesDenseMatrix) {
    std::mt19937_64 rng(3);
    for (long J : {2L, 3L, 5L, 12L, 40L}) {
        const Grid1D g(J, 1.5);
        const Field1D v = random_field(g, rng);
        const Field1D a = NeumannLaplacian1D(g).apply(v);
        const auto ref = dense_apply(J, g.dx(), v.vector());
        for (long j = 0; j < J; ++j) EXPECT_NEAR(a[j], ref[j], 1e-12 / (g.dx() * g.dx()));
    }
}

TEST(Apply, GridMismatchThrows) {
    EXPECT_THROW((void)NeumannLaplacian1D(Grid1D(4, 1.0)).apply(Field1D(Grid1D(5, 1.0))), ContractError);
}

TEST(Apply, SymmetricAndNonpositive) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const Grid1D g(2 + k % 40, 1.0);
        const NeumannLaplacian1D op(g);
        const Field1D v = random_field(g, rng), w = random_field(g, rng);
        const double scale = 1.0 / (g.dx() * g.dx());
        EXPECT_NEAR(inner(op.apply(v), w), inner(v, op.apply(w)), 1e-12 * scale);
        EXPECT_LE(inner(op.apply(v), v), 1e-12 * scale);
    }
}

TEST(Eigenvalue, Examples) {
    EXPECT_EQ(eigenvalue(Grid1D(9, 1.0), 0), 0.0);
    EXPECT_NEAR(eigenvalue(Grid1D(2, 1.0), 1), -2.0, 1e-14);
    EXPECT_NEAR(eigenvalue(Grid1D(4, 3.0), 2), -2.0, 1e-14);
    EXPECT_THROW((void)eigenvalue(Grid1D(4, 1.0), 4), ContractError);
    EXPECT_THROW((void)eigenvalue(Grid1D(4, 1.0), -1), ContractError);
}

TEST(Eigenvector, Examples) {
    const Field1D w = eigenvector(Grid1D(2, 1.0), 1);
    EXPECT_NEAR(w[0], 1.0, 1e-15);
    EXPECT_NEAR(w[1], -1.0, 1e-15);
    for (double x : eigenvector(Grid1D(6, 1.0), 0).values()) EXPECT_EQ(x, 1.0);
    for (long l = 1; l < 20; ++l) EXPECT_NEAR(mean(eigenvector(Grid1D(20, 1.0), l)), 0.0, 1e-13);
    EXPECT_THROW((void)eigenvector(Grid1D(4, 1.0), 4), ContractError);
}

TEST(Eigenpairs, ExactOnSampledGrids) {
    for (long J : {2L, 3L, 17L, 64L, 257L}) {
        const Grid1D g(J, 1.0);
        const NeumannLaplacian1D op(g);
        double prev = 1.0;
        for (long l = 0; l < J; ++l) {
            const EigenPair e = eigenpair(g, l);
            EXPECT_LT(e.lambda, prev);
            prev = e.lambda;
            EXPECT_NEAR(norm_l2(e.vector), 1.0, 1e-12);
            const double r = norm_l2(op.apply(e.vector) - e.lambda * e.vector);
            EXPECT_LE(r, 1e-11 * std::max(1.0, std::fabs(e.lambda))) << "J=" << J << " l=" << l;
        }
    }
}

TEST(Eigenpairs, CompletenessReconstructsRandomField) {
    std::mt19937_64 rng(5);
    for (long J : {2L, 9L, 64L, 257L}) {
        const Grid1D g(J, 1.0);
        const Field1D v = random_field(g, rng);
        Field1D rec(g);
        for (long l = 0; l < J; ++l) {
            const Field1D w = eigenvector(g, l);
            rec += inner(v, w) * w;
        }
        EXPECT_LE(norm_l2(rec - v), 1e-11 * norm_l2(v));
    }
}

TEST(Eigenpairs, GapIsSmallestNonzeroMagnitude) {
    for (long J : {2L, 5L, 100L}) {
        const Grid1D g(J, 2.0);
        double mn = INFINITY;
        for (long l = 1; l < J; ++l) mn = std::min(mn, std::fabs(eigenvalue(g, l)));
        const double s = std::sin(std::numbers::pi / (2.0 * J));
        EXPECT_NEAR(spectral_gap(g), mn, 1e-13 * mn);
        EXPECT_NEAR(spectral_gap(g), 4.0 / (g.dx() * g.dx()) * s * s, 1e-13 * mn);
    }
}

TEST(Cfl, Examples) {
    const Grid1D g(11, 1.0);
    const double h2 = g.dx() * g.dx();
    EXPECT_TRUE(cfl_ok(g, h2 / 2));
    EXPECT_FALSE(cfl_ok(g, 0.51 * h2));
    EXPECT_TRUE(cfl_ok(g, h2 / 4));
    EXPECT_FALSE(cfl_ok(g, 0.0));
    EXPECT_THROW(require_cfl(g, 0.51 * h2), CflError);
}

TEST(Eta, Examples) {
    EXPECT_NEAR(eta(Grid1D(2, 1.0), 0.5), 0.0, 1e-15);
    EXPECT_NEAR(eta(Grid1D(2, 1.0), 0.25), 0.5, 1e-15);
    const Grid1D g(17, 1.0);
    const double e = eta(g, g.dx() * g.dx() / 2);
    EXPECT_GT(e, 0.0);
    EXPECT_LT(e, 1.0);
    EXPECT_LT(eta(g, 1e-12), 1.0);
    EXPECT_GT(eta(g, 1e-12), 1.0 - 1e-9);
}

TEST(Eta, EqualsFullMaximum) {
    for (long J : {3L, 10L, 65L})
        for (double c : {0.5, 0.3, 0.1}) {
            const Grid1D g(J, 1.0);
            const double dt = c * g.dx() * g.dx();
            double m = 0;
            for (long l = 1; l < J; ++l) m = std::max(m, std::fabs(1 + dt * eigenvalue(g, l)));
            EXPECT_NEAR(eta(g, dt), m, 1e-15);
        }
}

TEST(Amplification, Examples) {
    const Grid1D g17(17, 1.0);
    const auto r = amplification_bound_check(g17, g17.dx() * g17.dx() / 2);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.margins.size(), 17u);
    EXPECT_NEAR(r.margins[0], 0.0, 1e-15);
    for (double m : r.margins) EXPECT_GE(m, 0.0);
    const Grid1D g64(64, 1.0);
    EXPECT_TRUE(amplification_bound_check(g64, g64.dx() * g64.dx() / 4).pass);
    EXPECT_THROW(amplification_bound_check(g64, g64.dx() * g64.dx()), CflError);
}

TEST(Amplification, PerturbedEigenvaluesFail) {
    const Grid1D g(64, 1.0);
    EXPECT_FALSE(amplification_bound_check(g, g.dx() * g.dx() / 2, 1.001).pass);
}

TEST(EtaSum, Examples) {
    const Grid1D g17(17, 1.0);
    const double dt17 = g17.dx() * g17.dx() / 2;
    EXPECT_DOUBLE_EQ(eta_geometric_sum(g17, dt17, 1), dt17);
    EXPECT_LE(eta_geometric_sum(g17, dt17, 1'000'000), 2.0);
    const Grid1D g33(33, 2.0);
    EXPECT_LE(eta_geometric_sum(g33, g33.dx() * g33.dx() / 2, 1'000'000), 8.0);
}

TEST(EtaSum, MatchesLoopOracle) {
    const Grid1D g(9, 1.0);
    const double dt = 0.3 * g.dx() * g.dx();
    const double e = eta(g, dt);
    double acc = 0, pw = 1;
    for (int k = 0; k < 500; ++k) {
        acc += pw;
        pw *= e;
    }
    EXPECT_NEAR(eta_geometric_sum(g, dt, 500), dt * acc, 1e-13);
}

TEST(ResolventSum, Examples) {
    const Grid1D g9(9, 1.0);
    const double dt9 = g9.dx() * g9.dx() / 2;
    EXPECT_NEAR(resolvent_power_sum(g9, dt9, 1), 8 * dt9 * dt9, 1e-18);
    const Grid1D g65(65, 1.0);
    EXPECT_LE(resolvent_power_sum(g65, g65.dx() * g65.dx() / 2, 100'000), 4 * std::pow(std::numbers::pi, 4) / 90);
    EXPECT_NEAR(resolvent_power_sum_bound(1.0), 4 * std::pow(std::numbers::pi, 4) / 90, 1e-12);
}

TEST(ResolventSum, MonotoneInNAndMatchesLoop) {
    const Grid1D g(9, 1.0);
    const double dt = g.dx() * g.dx() / 2;
    double prev = 0;
    for (long long n = 1; n <= 400; n += 7) {
        const double v = resolvent_power_sum(g, dt, n);
        EXPECT_GE(v, prev);
        prev = v;
    }
    double oracle = 0;
    for (long l = 1; l < 9; ++l) {
        const double q = 1 + dt * eigenvalue(g, l);
        double s = 0, pw = 1;
        for (int k = 0; k < 50; ++k) {
            s += pw;
            pw *= q;
        }
        oracle += dt * dt * s * s;
    }
    EXPECT_NEAR(resolvent_power_sum(g, dt, 50), oracle, 1e-14);
}

TEST(KernelSum, Examples) {
    const Grid1D g2(2, 1.0);
    EXPECT_NEAR(heat_kernel_spectrum_sum(g2, 0.7, 3).value, std::exp(-2.1), 1e-15);
    const auto k = heat_kernel_spectrum_sum(Grid1D(101, 1.0), 0.5, 100);
    EXPECT_NEAR(k.bound, std::sqrt(std::numbers::pi / 50), 1e-15);
    EXPECT_LE(k.value, k.bound);
    double prev = INFINITY;
    for (long long m : {1, 2, 5, 10, 100, 1000}) {
        const double v = heat_kernel_spectrum_sum(Grid1D(40, 1.0), 0.3, m).value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Bounds, SweepPasses) {
    for (long J = 2; J <= 512; J += (J < 40 ? 1 : 37)) {
        const Grid1D g(J, 1.0);
        for (double c : {0.5, 0.25, 0.1}) {
            const double dt = c * g.dx() * g.dx();
            EXPECT_TRUE(amplification_bound_check(g, dt).pass);
            EXPECT_LE(eta_geometric_sum(g, dt, 1'000'000), 2.0);
            EXPECT_LE(resolvent_power_sum(g, dt, 1'000'000), resolvent_power_sum_bound(1.0));
            for (long long m : {1, 10, 100, 1000}) {
                const auto k = heat_kernel_spectrum_sum(g, c, m);
                EXPECT_LE(k.value, k.bound);
            }
        }
    }
}
