#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rtpca/tangent.hpp"
#include "rtpca/tsvd.hpp"

using namespace rtpca;

namespace {

Tensor3 low_rank(Index n1, Index n2, Index r, Index n3, std::mt19937_64& rng) {
    return tprod(oracle::random_tensor({n1, r, n3}, rng), ttranspose(oracle::random_tensor({n2, r, n3}, rng)));
}

Dims random_dims(std::mt19937_64& rng, Index m1, Index m2, Index m3) {
    std::uniform_int_distribution<Index> a(1, m1), b(1, m2), c(1, m3);
    return {a(rng), b(rng), c(rng)};
}

double prox_objective(const Tensor3& z, const Tensor3& a, double tau) {
    return tau * oracle::nuclear_norm(z) + 0.5 * std::pow(norm(z - a), 2);
}

} // namespace

TEST(Tsvd, ZeroTensorHasRankZero) {
    const TSvdFactors f = tsvd_skinny(Tensor3({3, 4, 2}));
    EXPECT_EQ(f.rank, 0);
    EXPECT_EQ(f.U.dims(), (Dims{3, 0, 2}));
    EXPECT_EQ(f.V.dims(), (Dims{4, 0, 2}));
    EXPECT_EQ(f.S.size(), 0);
}

TEST(Tsvd, IdentityTensor) {
    const TSvdFactors f = tsvd_skinny(identity_tensor(3, 4));
    EXPECT_EQ(f.rank, 3);
    EXPECT_LT(norm(f.S - identity_tensor(3, 4)), 1e-12);
}

TEST(Tsvd, ForcedRankTwo) {
    std::mt19937_64 rng(1);
    const Tensor3 a = low_rank(6, 5, 2, 3, rng);
    const TSvdFactors f = tsvd_skinny(a);
    EXPECT_EQ(f.rank, 2);
    EXPECT_LT(oracle::rel(tprod(tprod(f.U, f.S), ttranspose(f.V)), a), 1e-9);
    // bcirc of a tubal-rank-2 tensor has rank at most 2 N3
    const Eigen::VectorXd s = oracle::bcirc_singular_values(a);
    EXPECT_LT(s(6) / s(0), 1e-12);
}

TEST(Tsvd, FactorContractOnRandomTensors) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 40; ++t) {
        const Tensor3 a = oracle::random_tensor(random_dims(rng, 12, 12, 6), rng);
        const TSvdFactors f = tsvd_skinny(a);
        const Tensor3 id = identity_tensor(f.rank, a.n3());
        EXPECT_LT(norm(tprod(ttranspose(f.U), f.U) - id), 1e-9);
        EXPECT_LT(norm(tprod(ttranspose(f.V), f.V) - id), 1e-9);
        EXPECT_LT(oracle::rel(tprod(tprod(f.U, f.S), ttranspose(f.V)), a), 1e-9);
        for (Index k = 0; k < f.S.n3(); ++k)
            for (Index i = 0; i < f.rank; ++i)
                for (Index j = 0; j < f.rank; ++j)
                    if (i != j) EXPECT_EQ(f.S(i, j, k), 0.0);
        for (Index i = 0; i < f.rank; ++i) {
            EXPECT_GE(f.S(i, i, 0), 0.0);
            if (i > 0) EXPECT_LE(f.S(i, i, 0), f.S(i - 1, i - 1, 0));
        }
    }
}

TEST(Tsvd, RankToleranceIsScaleInvariant) {
    std::mt19937_64 rng(3);
    const Tensor3 a = low_rank(7, 6, 3, 4, rng);
    EXPECT_EQ(tubal_rank(a), 3);
    EXPECT_EQ(tubal_rank(1e8 * a), 3);
    EXPECT_EQ(tubal_rank(1e-8 * a), 3);
    EXPECT_THROW(tsvd_skinny(a, -1.0), DomainError);
}

TEST(TubalRank, Examples) {
    std::mt19937_64 rng(4);
    EXPECT_EQ(tubal_rank(Tensor3({3, 3, 3})), 0);
    EXPECT_EQ(tubal_rank(identity_tensor(4, 2)), 4);
    EXPECT_EQ(tubal_rank(low_rank(6, 5, 3, 3, rng)), 3);
}

TEST(TubalRank, TubeAndFirstSliceCountsAgree) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        std::uniform_int_distribution<Index> r(0, 4);
        const Tensor3 a = low_rank(6, 6, r(rng), 4, rng);
        EXPECT_EQ(tubal_rank_tubes(a), tubal_rank(a));
    }
}

TEST(SpectralNorm, Examples) {
    EXPECT_NEAR(spectral_norm(identity_tensor(4, 3)), 1.0, 1e-14);
    const double a = 1.0, b = -2.0, c = 0.5;
    const Tensor3 t({1, 1, 3}, {a, b, c});
    double want = 0.0;
    for (int m = 0; m < 3; ++m) {
        const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * m / 3.0);
        want = std::max(want, std::abs(a + b * w + c * w * w));
    }
    EXPECT_NEAR(spectral_norm(t), want, 1e-12);
    std::mt19937_64 rng(6);
    const Tensor3 r = oracle::random_tensor({5, 4, 3}, rng);
    EXPECT_LT(oracle::rel(spectral_norm(r), oracle::spectral_norm(r)), 1e-9);
}

TEST(NuclearNorm, Examples) {
    EXPECT_NEAR(nuclear_norm(identity_tensor(5, 3)), 5.0, 1e-12);
    EXPECT_EQ(nuclear_norm(Tensor3({2, 2, 2})), 0.0);
    std::mt19937_64 rng(7);
    const Tensor3 r = oracle::random_tensor({4, 4, 3}, rng);
    EXPECT_LT(oracle::rel(nuclear_norm(r), oracle::nuclear_norm(r)), 1e-9);
}

TEST(NuclearNorm, DualPairingBound) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        const Dims d = random_dims(rng, 6, 6, 5);
        const Tensor3 a = oracle::random_tensor(d, rng);
        const Tensor3 b = oracle::random_tensor(d, rng);
        EXPECT_LE(std::abs(inner(a, b)), spectral_norm(a) * nuclear_norm(b) + 1e-9);
    }
}

TEST(TnnZhang, Examples) {
    EXPECT_NEAR(tnn_zhang(identity_tensor(4, 3)), 4.0, 1e-12);
    EXPECT_EQ(tnn_zhang(Tensor3({2, 3, 2})), 0.0);
    std::mt19937_64 rng(9);
    const Tensor3 a = oracle::random_tensor({3, 3, 2}, rng);
    const TSvdFactors f = tsvd_skinny(a);
    double direct = 0.0;
    for (Index k = 0; k < 2; ++k)
        for (Index i = 0; i < f.rank; ++i) direct += f.S(i, i, k);
    EXPECT_NEAR(tnn_zhang(a), direct, 1e-12);
}

TEST(Prox, ZeroThresholdIsIdentity) {
    std::mt19937_64 rng(10);
    const Tensor3 a = oracle::random_tensor({3, 4, 3}, rng);
    EXPECT_EQ(tsvt_prox(a, 0.0), a);
    EXPECT_THROW(tsvt_prox(a, -0.1), DomainError);
}

TEST(Prox, LargeThresholdKillsEverything) {
    EXPECT_TRUE(tsvt_prox(identity_tensor(2, 2), 10.0).is_zero());
}

// f-diagonal source with N3 = 2: Fourier slices are D0 + D1 and D0 - D1, so
// each scalar spectrum entry is shrunk by tau independently.
TEST(Prox, FDiagonalShrinksFourierSpectrum) {
    Tensor3 a({2, 2, 2});
    a(0, 0, 0) = 3.0, a(0, 0, 1) = 1.0; // Fourier (4, 2)
    a(1, 1, 0) = 1.0, a(1, 1, 1) = 0.5; // Fourier (1.5, 0.5)
    const Tensor3 z = tsvt_prox(a, 1.0);
    // shrunk to (3, 1) and (0.5, 0); inverse DFT gives (2, 1) and (0.25, 0.25)
    EXPECT_NEAR(z(0, 0, 0), 2.0, 1e-12);
    EXPECT_NEAR(z(0, 0, 1), 1.0, 1e-12);
    EXPECT_NEAR(z(1, 1, 0), 0.25, 1e-12);
    EXPECT_NEAR(z(1, 1, 1), 0.25, 1e-12);
    EXPECT_NEAR(z(0, 1, 0), 0.0, 1e-12);
}

TEST(Prox, IsALocalMinimizerOfTheProxObjective) {
    std::mt19937_64 rng(11);
    for (double tau : {0.1, 1.0, 3.0}) {
        const Tensor3 a = oracle::random_tensor({4, 3, 3}, rng);
        const Tensor3 z = tsvt_prox(a, tau);
        const double best = prox_objective(z, a, tau);
        for (int t = 0; t < 20; ++t) {
            const Tensor3 d = 1e-3 * oracle::random_tensor(a.dims(), rng);
            EXPECT_GE(prox_objective(z + d, a, tau), best - 1e-12);
        }
    }
}

TEST(Prox, SatisfiesSubgradientOptimality) {
    std::mt19937_64 rng(12);
    for (double tau : {0.1, 1.0, 10.0}) {
        for (int t = 0; t < 10; ++t) {
            const Tensor3 a = oracle::random_tensor(random_dims(rng, 6, 6, 5), rng);
            const Tensor3 z = tsvt_prox(a, tau);
            if (z.is_zero()) continue;
            EXPECT_TRUE(subgradient_member(z, (1.0 / tau) * (a - z), 1e-6)) << "tau " << tau;
        }
    }
}

TEST(Prox, ReportsNormsOfItsResult) {
    std::mt19937_64 rng(13);
    const Tensor3 a = oracle::random_tensor({5, 4, 4}, rng);
    const ProxOutput p = tsvt_prox_with_norms(a, 0.7);
    EXPECT_NEAR(p.nuclear, nuclear_norm(p.value), 1e-10);
    EXPECT_NEAR(p.tnn_zhang, tnn_zhang(p.value), 1e-10);
}

TEST(Subgradient, Examples) {
    std::mt19937_64 rng(14);
    const Tensor3 a = low_rank(5, 4, 1, 3, rng);
    const TangentBasis t = tangent_of(a);
    EXPECT_TRUE(subgradient_member(a, t.polar(), 1e-9));

    Tensor3 w = project_T_perp(t, oracle::random_tensor(a.dims(), rng));
    w *= 1.0 / spectral_norm(w);
    EXPECT_TRUE(subgradient_member(a, t.polar() + 0.5 * w, 1e-9));
    EXPECT_FALSE(subgradient_member(a, t.polar() + 2.0 * w, 1e-9));
    EXPECT_NEAR(subgradient_residual(a, t.polar() + 2.0 * w).w_spectral, 2.0, 1e-9);

    ASSERT_GT(oracle::spectral_norm(a), 1.0);
    EXPECT_FALSE(subgradient_member(a, a, 1e-6));
    EXPECT_THROW(subgradient_member(a, Tensor3({1, 1, 1}), 1e-6), ShapeMismatch);
}
