#pragma once

// Tangent space T(L) of the low-tubal-rank variety and the support space
// Omega(E), with their orthogonal projectors.

#include <cstdint>
#include <span>
#include <vector>

#include "rtpca/tensor.hpp"
#include "rtpca/tsvd.hpp"

namespace rtpca {

/// T(L) = { U * Y^T + W * V^T }, described by orthonormal U (N1 x R x N3) and
/// V (N2 x R x N3). Caches the projectors PU = U * U^T, PV = V * V^T and the
/// Fourier slices of U and V used to apply them.
class TangentBasis {
public:
    /// U and V must have orthonormal columns under the t-product.
    static TangentBasis from_factors(Tensor3 u, Tensor3 v);

    const Tensor3& U() const noexcept { return u_; }
    const Tensor3& V() const noexcept { return v_; }
    const Tensor3& PU() const noexcept { return pu_; }
    const Tensor3& PV() const noexcept { return pv_; }
    Index rank() const noexcept { return u_.n2(); }
    /// Shape of the tensors this space lives in: N1 x N2 x N3.
    Dims ambient() const noexcept { return {u_.n1(), v_.n1(), u_.n3()}; }

    /// U * V^T.
    Tensor3 polar() const;

    /// Independent Fourier slices of U and V.
    const std::vector<Eigen::MatrixXcd>& u_slices() const noexcept { return ubar_; }
    const std::vector<Eigen::MatrixXcd>& v_slices() const noexcept { return vbar_; }

private:
    TangentBasis() = default;

    Tensor3 u_, v_, pu_, pv_;
    std::vector<Eigen::MatrixXcd> ubar_, vbar_;
};

/// Tangent space at L from its skinny t-SVD.
TangentBasis tangent_of(const Tensor3& l, double rank_tol = kDefaultRankTol);

/// PU * A + A * PV - PU * A * PV.
Tensor3 project_T(const TangentBasis& t, const Tensor3& a);
/// (I - PU) * A * (I - PV).
Tensor3 project_T_perp(const TangentBasis& t, const Tensor3& a);

/// Boolean support pattern with cached nonzero counts per horizontal slice
/// (fixed n1) and per lateral slice (fixed n2).
class SupportMask {
public:
    SupportMask(Dims dims, std::vector<std::uint8_t> mask);
    static SupportMask empty(Dims dims);
    static SupportMask full(Dims dims);

    const Dims& dims() const noexcept { return dims_; }
    bool operator()(Index i, Index j, Index k) const noexcept {
        return mask_[static_cast<std::size_t>((i * dims_.n2 + j) * dims_.n3 + k)] != 0;
    }
    std::span<const std::uint8_t> mask() const noexcept { return mask_; }
    Index count() const noexcept { return count_; }
    std::span<const Index> horizontal_counts() const noexcept { return horizontal_; }
    std::span<const Index> lateral_counts() const noexcept { return lateral_; }

    /// 0/1 tensor of the support.
    Tensor3 indicator() const;

private:
    Dims dims_;
    std::vector<std::uint8_t> mask_;
    std::vector<Index> horizontal_;
    std::vector<Index> lateral_;
    Index count_ = 0;
};

/// Entries with |E(i,j,k)| > tol.
SupportMask support_of(const Tensor3& e, double tol = 0.0);
/// Entrywise sign in {-1, 0, +1}.
Tensor3 sign_of(const Tensor3& e);

Tensor3 project_omega(const SupportMask& m, const Tensor3& a);
Tensor3 project_omega_comp(const SupportMask& m, const Tensor3& a);

inline constexpr std::uint64_t kGaugeSeed = 0x7a11'5eedULL;

/// Power-iteration estimate of the operator norm of P_Omega o P_T on
/// R^{N1 N2 N3}, computed as sqrt of the top eigenvalue of P_T P_Omega P_T.
/// A value below 1 witnesses T and Omega intersecting only at zero.
/// Throws NonConvergence if the Rayleigh quotient is still moving by more
/// than `tol` after `iters` iterations.
double transversality_gauge(const TangentBasis& t, const SupportMask& m, int iters = 500,
                            double tol = 1e-8, std::uint64_t seed = kGaugeSeed);

} // namespace rtpca
