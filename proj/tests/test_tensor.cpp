#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rtpca/tensor.hpp"
#include "rtpca/tensor_io.hpp"

using namespace rtpca;

namespace {

Tensor3 tube(std::vector<double> v) {
    const Index n3 = static_cast<Index>(v.size());
    return Tensor3({1, 1, n3}, std::move(v));
}

Dims random_dims(std::mt19937_64& rng, Index hi = 8) {
    std::uniform_int_distribution<Index> d(1, hi);
    return {d(rng), d(rng), d(rng)};
}

} // namespace

TEST(Tensor3, ConstructorValidates) {
    EXPECT_THROW(Tensor3({2, 2, 2}, std::vector<double>(7)), ShapeMismatch);
    EXPECT_THROW(Tensor3({1, 1, 2}, {1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidValue);
    EXPECT_THROW(Tensor3({1, 1, 1}, {std::numeric_limits<double>::infinity()}), InvalidValue);
    const Tensor3 t({2, 3, 4});
    EXPECT_EQ(t.size(), 24);
    EXPECT_TRUE(t.is_zero());
}

TEST(Tensor3, LayoutAndBoundsChecks) {
    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    const Tensor3 t({2, 3, 2}, v);
    EXPECT_EQ(t(1, 2, 1), 11.0);
    EXPECT_EQ(t(0, 1, 0), 2.0);
    EXPECT_EQ(t.at(1, 0, 1), 7.0);
    EXPECT_THROW(t.at(2, 0, 0), IndexOutOfRange);
    EXPECT_THROW(t.at(0, 0, -1), IndexOutOfRange);
}

TEST(Dft, LengthTwoTube) {
    const FourierSlices f = dft_mode3(tube({1.0, 2.0}));
    ASSERT_EQ(f.slices.size(), 2u);
    EXPECT_NEAR(std::abs(f.slices[0](0, 0) - cplx(3.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.slices[1](0, 0) - cplx(-1.0)), 0.0, 1e-15);
    const Tensor3 back = idft_mode3(f);
    EXPECT_DOUBLE_EQ(back(0, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(back(0, 0, 1), 2.0);
}

TEST(Dft, ZeroInZeroOut) {
    const Tensor3 z({3, 2, 5});
    const FourierSlices f = dft_mode3(z);
    for (const auto& s : f.slices) EXPECT_EQ(s.norm(), 0.0);
    EXPECT_TRUE(idft_mode3(f).is_zero());
}

TEST(Dft, SlicesMatchDirectSumAndAreConjugateSymmetric) {
    std::mt19937_64 rng(1);
    for (Index n3 : {1, 2, 3, 5, 6, 8}) {
        const Tensor3 a = oracle::random_tensor({3, 4, n3}, rng);
        const FourierSlices f = dft_mode3(a);
        for (Index k = 0; k < n3; ++k) {
            EXPECT_LT((f.slices[static_cast<std::size_t>(k)] - oracle::fourier_slice(a, k)).norm(), 1e-12);
            const Index m = (n3 - k) % n3;
            EXPECT_LT((f.slices[static_cast<std::size_t>(k)] - f.slices[static_cast<std::size_t>(m)].conjugate()).norm(),
                      1e-12);
        }
    }
}

TEST(Dft, RoundTripAndParseval) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        const Tensor3 a = oracle::random_tensor(random_dims(rng), rng);
        const FourierSlices f = dft_mode3(a);
        EXPECT_LT(oracle::rel(idft_mode3(f), a), 1e-12);
        double energy = 0.0;
        for (const auto& s : f.slices) energy += s.squaredNorm();
        EXPECT_NEAR(energy / static_cast<double>(a.n3()), std::pow(norm(a), 2), 1e-10 * energy);
    }
}

TEST(Dft, AsymmetricSpectrumIsRejected) {
    std::mt19937_64 rng(3);
    FourierSlices f = dft_mode3(oracle::random_tensor({2, 2, 4}, rng));
    f.slices[1](0, 0) += cplx(0.0, 1.0);
    EXPECT_THROW(idft_mode3(f), SymmetryViolation);
}

TEST(Bcirc, IdentityAndScalarCirculant) {
    EXPECT_EQ(bcirc(identity_tensor(3, 4)), Eigen::MatrixXd::Identity(12, 12));
    const Eigen::MatrixXd c = bcirc(tube({1.0, 2.0, 3.0}));
    Eigen::MatrixXd want(3, 3);
    want << 1, 3, 2, 2, 1, 3, 3, 2, 1;
    EXPECT_EQ(c, want);
}

TEST(Bcirc, MatchesOracleAndMultiplies) {
    std::mt19937_64 rng(4);
    const Tensor3 a = oracle::random_tensor({2, 3, 2}, rng);
    const Tensor3 b = oracle::random_tensor({3, 4, 2}, rng);
    EXPECT_EQ(bcirc(a), oracle::bcirc(a));
    EXPECT_LT((bcirc(a) * unfold(b) - unfold(tprod(a, b))).norm(), 1e-12);
    EXPECT_LT((bcirc(tprod(a, b)) - bcirc(a) * bcirc(b)).norm(), 1e-12);
    EXPECT_LT((bcirc(a + 2.0 * a) - 3.0 * bcirc(a)).norm(), 1e-12);
}

TEST(Bcirc, SizeCap) {
    EXPECT_THROW(bcirc(Tensor3({10, 10, 10}), 99 * 99), SizeOverflow);
}

TEST(Unfold, StacksSlicesAndFoldInverts) {
    std::mt19937_64 rng(5);
    const Tensor3 a = oracle::random_tensor({2, 2, 3}, rng);
    const Eigen::MatrixXd u = unfold(a);
    for (Index k = 0; k < 3; ++k) EXPECT_EQ(u.middleRows(2 * k, 2), a.frontal_slice(k));
    EXPECT_EQ(fold(u, 3), a);
    EXPECT_EQ(u, oracle::unfold(a));
    EXPECT_THROW(fold(Eigen::MatrixXd::Zero(5, 2), 2), ShapeMismatch);
}

TEST(Tprod, TubeConvolution) {
    const Tensor3 c = tprod(tube({1.0, 2.0}), tube({3.0, 4.0}));
    EXPECT_NEAR(c(0, 0, 0), 11.0, 1e-12);
    EXPECT_NEAR(c(0, 0, 1), 10.0, 1e-12);
}

TEST(Tprod, IdentityIsNeutral) {
    std::mt19937_64 rng(6);
    const Tensor3 a = oracle::random_tensor({3, 4, 5}, rng);
    EXPECT_LT(oracle::rel(tprod(a, identity_tensor(4, 5)), a), 1e-13);
    EXPECT_LT(oracle::rel(tprod(identity_tensor(3, 5), a), a), 1e-13);
}

TEST(Tprod, MatchesOracleOnRandomShapes) {
    std::mt19937_64 rng(7);
    const Tensor3 a = oracle::random_tensor({3, 2, 4}, rng);
    const Tensor3 b = oracle::random_tensor({2, 5, 4}, rng);
    EXPECT_LT(oracle::rel(tprod(a, b), oracle::tprod(a, b)), 1e-10);
    for (int t = 0; t < 50; ++t) {
        const Dims d = random_dims(rng);
        std::uniform_int_distribution<Index> l(1, 8);
        const Tensor3 x = oracle::random_tensor(d, rng);
        const Tensor3 y = oracle::random_tensor({d.n2, l(rng), d.n3}, rng);
        EXPECT_LT(oracle::rel(tprod(x, y), oracle::tprod(x, y)), 1e-10);
    }
    EXPECT_THROW(tprod(a, a), ShapeMismatch);
}

TEST(Ttranspose, SliceOrderAndInvolution) {
    std::mt19937_64 rng(8);
    const Tensor3 a = oracle::random_tensor({2, 3, 4}, rng);
    const Tensor3 t = ttranspose(a);
    ASSERT_EQ(t.dims(), (Dims{3, 2, 4}));
    // slices come back in the order 1, 4, 3, 2
    const Index order[4] = {0, 3, 2, 1};
    for (Index k = 0; k < 4; ++k) EXPECT_EQ(t.frontal_slice(k), a.frontal_slice(order[k]).transpose());
    EXPECT_EQ(ttranspose(t), a);
    EXPECT_EQ(bcirc(t), bcirc(a).transpose());
}

TEST(Ttranspose, ReversesProducts) {
    std::mt19937_64 rng(9);
    const Tensor3 a = oracle::random_tensor({3, 4, 5}, rng);
    const Tensor3 b = oracle::random_tensor({4, 2, 5}, rng);
    EXPECT_LT(oracle::rel(ttranspose(tprod(a, b)), tprod(ttranspose(b), ttranspose(a))), 1e-10);
}

TEST(Basis, IdentityAndUnitElements) {
    const Tensor3 id = identity_tensor(2, 3);
    EXPECT_EQ(norm(id, NormKind::l1), 2.0);
    EXPECT_EQ(id(0, 0, 0), 1.0);
    EXPECT_EQ(id(1, 1, 0), 1.0);

    const Tensor3 col = basis({BasisKind::column, 1, 4, 3});
    EXPECT_EQ(col.dims(), (Dims{4, 1, 3}));
    EXPECT_EQ(col(1, 0, 0), 1.0);
    EXPECT_EQ(norm(col, NormKind::l1), 1.0);

    const Tensor3 tb = basis({BasisKind::tube, 1, 1, 3});
    EXPECT_EQ(tb.dims(), (Dims{1, 1, 3}));
    EXPECT_EQ(tb(0, 0, 1), 1.0);
    EXPECT_EQ(norm(tb, NormKind::l1), 1.0);

    EXPECT_THROW(basis({BasisKind::column, 4, 4, 3}), IndexOutOfRange);
    EXPECT_THROW(basis({BasisKind::tube, 3, 1, 3}), IndexOutOfRange);
}

TEST(Norms, ClosedForms) {
    const Tensor3 z({2, 3, 2});
    for (NormKind k : {NormKind::fro, NormKind::l1, NormKind::linf}) EXPECT_EQ(norm(z, k), 0.0);
    const Tensor3 ones = Tensor3::constant({2, 3, 2}, 1.0);
    EXPECT_DOUBLE_EQ(norm(ones), std::sqrt(12.0));
    EXPECT_DOUBLE_EQ(norm(ones, NormKind::l1), 12.0);
    EXPECT_DOUBLE_EQ(norm(ones, NormKind::linf), 1.0);

    std::mt19937_64 rng(10);
    const Tensor3 a = oracle::random_tensor({3, 3, 3}, rng);
    EXPECT_NEAR(inner(a, a), norm(a) * norm(a), 1e-12);
    EXPECT_THROW(inner(a, z), ShapeMismatch);
}

TEST(TensorIo, RoundTripIsExact) {
    std::mt19937_64 rng(11);
    const Tensor3 a = oracle::random_tensor({3, 2, 4}, rng);
    std::stringstream s;
    write_tensor(s, a);
    EXPECT_EQ(read_tensor(s), a);
}

TEST(TensorIo, RejectsMalformedInput) {
    std::istringstream bad_header("2 2\n1 2 3 4\n");
    EXPECT_THROW(read_tensor(bad_header), ParseError);
    std::istringstream short_body("1 1 3\n1 2\n");
    EXPECT_THROW(read_tensor(short_body), ParseError);
    std::istringstream garbage("1 1 2\n1 x\n");
    EXPECT_THROW(read_tensor(garbage), ParseError);
    EXPECT_THROW(read_tensor_file("/nonexistent/file.t3"), ParseError);
}

TEST(TensorIo, HeaderThenValues) {
    std::istringstream in("1 2 2\n1 2\n3 4\n");
    const Tensor3 t = read_tensor(in);
    EXPECT_EQ(t(0, 0, 1), 2.0);
    EXPECT_EQ(t(0, 1, 0), 3.0);
}
