#pragma once

// t-SVD and the spectral quantities derived from it.

#include <vector>

#include "rtpca/tensor.hpp"

namespace rtpca {

/// Default rank tolerance, relative to the largest first-slice singular value.
inline constexpr double kDefaultRankTol = 1e-10;

/// Skinny t-SVD A = U * S * V^T with U: N1 x R x N3, S: R x R x N3 (f-diagonal),
/// V: N2 x R x N3.
struct TSvdFactors {
    Tensor3 U;
    Tensor3 S;
    Tensor3 V;
    Index rank = 0;
};

/// SVDs of the independent Fourier slices (k = 0 .. N3/2). The remaining
/// slices follow by conjugation.
struct FourierSvd {
    Dims dims;
    std::vector<Eigen::MatrixXcd> U; // empty when vectors were not requested
    std::vector<Eigen::MatrixXcd> V;
    std::vector<Eigen::VectorXd> sigma; // nonincreasing per slice

    /// Multiplicity of independent slice k among all N3 slices (1 or 2).
    double weight(Index k) const noexcept {
        return (k == 0 || 2 * k == dims.n3) ? 1.0 : 2.0;
    }
    /// Diagonal of the first frontal slice of S, i.e. S(i, i, 0) for all i.
    Eigen::VectorXd first_slice_diagonal() const;
    double max_singular_value() const;
};

/// Throws ConvergenceFailure if a slice SVD does not converge.
FourierSvd fourier_svd(const FourierSlices& f, bool with_vectors);

/// `rank_tol` is relative to S(0, 0, 0); singular tubes whose first-slice
/// entry does not exceed it are dropped.
TSvdFactors tsvd_skinny(const Tensor3& a, double rank_tol = kDefaultRankTol);

/// Number of i with S(i, i, 0) > tol * S(0, 0, 0).
Index tubal_rank(const Tensor3& a, double tol = kDefaultRankTol);
/// Number of singular tubes with ||S(i, i, :)|| > tol * ||S(0, 0, :)||.
Index tubal_rank_tubes(const Tensor3& a, double tol = kDefaultRankTol);

/// ||bcirc(A)||, the largest singular value over all Fourier slices.
double spectral_norm(const Tensor3& a);
/// sum_i S(i, i, 0) = (1/N3) ||bcirc(A)||_*.
double nuclear_norm(const Tensor3& a);
/// sum over all frontal slices k and i of S(i, i, k), taken literally from the
/// spatial-domain S of the skinny t-SVD.
double tnn_zhang(const Tensor3& a);

/// argmin_Z tau ||Z||_* + 1/2 ||Z - A||_F^2.
Tensor3 tsvt_prox(const Tensor3& a, double tau);

struct ProxOutput {
    Tensor3 value;
    double nuclear = 0.0;   // ||value||_*
    double tnn_zhang = 0.0; // tnn_zhang(value)
};
/// tsvt_prox that also reports the norms of its result from the shrunk spectrum.
ProxOutput tsvt_prox_with_norms(const Tensor3& a, double tau);

/// Residuals of the decomposition G = U * V^T + W used by subgradient_member.
struct SubgradientResidual {
    double u_orth = 0.0;  // ||U^T * W||_F
    double v_orth = 0.0;  // ||W * V||_F
    double w_spectral = 0.0; // ||W||
};

SubgradientResidual subgradient_residual(const Tensor3& a, const Tensor3& g);

/// True iff G lies in the subdifferential of ||.||_* at A, up to `tol`
/// (orthogonality residuals scaled by max(1, ||G||_F); ||W|| <= 1 + tol).
///
/// Slices are handled in the Fourier domain with their own numerical rank, so
/// Fourier slices where a singular tube vanishes contribute no U * V^T term.
bool subgradient_member(const Tensor3& a, const Tensor3& g, double tol);

} // namespace rtpca
