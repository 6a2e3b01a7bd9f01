#pragma once

// Dense third-order tensors and the t-product algebra built on the DFT along
// the third mode.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rtpca/errors.hpp"

namespace rtpca {

using Index = Eigen::Index;
using cplx = std::complex<double>;

struct Dims {
    Index n1 = 0;
    Index n2 = 0;
    Index n3 = 0;

    Index size() const noexcept { return n1 * n2 * n3; }
    bool operator==(const Dims&) const = default;
};

std::string to_string(const Dims& d);

/// Dense real N1 x N2 x N3 array stored row-major in (n1, n2, n3), so every
/// tube A(i, j, :) is contiguous. All indices are zero-based.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Dims dims);
    /// Takes ownership of `data`; rejects wrong lengths and non-finite values.
    Tensor3(Dims dims, std::vector<double> data);

    static Tensor3 zeros(Dims dims) { return Tensor3(dims); }
    static Tensor3 constant(Dims dims, double value);

    const Dims& dims() const noexcept { return dims_; }
    Index n1() const noexcept { return dims_.n1; }
    Index n2() const noexcept { return dims_.n2; }
    Index n3() const noexcept { return dims_.n3; }
    Index size() const noexcept { return dims_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator()(Index i, Index j, Index k) const noexcept {
        return data_[offset(i, j, k)];
    }
    double& operator()(Index i, Index j, Index k) noexcept {
        return data_[offset(i, j, k)];
    }
    /// Bounds-checked access; throws IndexOutOfRange.
    double at(Index i, Index j, Index k) const;

    std::span<const double> tube(Index i, Index j) const noexcept {
        return {data_.data() + offset(i, j, 0), static_cast<std::size_t>(dims_.n3)};
    }

    Eigen::MatrixXd frontal_slice(Index k) const;
    void set_frontal_slice(Index k, const Eigen::MatrixXd& m);

    bool is_zero() const noexcept;

    Tensor3& operator+=(const Tensor3& o);
    Tensor3& operator-=(const Tensor3& o);
    Tensor3& operator*=(double s) noexcept;

    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
    friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
    friend Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

    bool operator==(const Tensor3&) const = default;

private:
    std::size_t offset(Index i, Index j, Index k) const noexcept {
        return static_cast<std::size_t>((i * dims_.n2 + j) * dims_.n3 + k);
    }

    Dims dims_{};
    std::vector<double> data_;
};

/// Frontal slices of the mode-3 DFT of a real tensor. Slice k is the
/// N1 x N2 complex matrix whose (i, j) entry is the k-th DFT coefficient of
/// tube (i, j). For real sources slice k and slice N3 - k are conjugates.
struct FourierSlices {
    Dims dims;
    std::vector<Eigen::MatrixXcd> slices;

    /// Number of slices that determine the rest by conjugate symmetry.
    Index independent() const noexcept { return dims.n3 / 2 + 1; }
    /// Overwrite slices k >= independent() with conjugates of their mirrors.
    void mirror();
};

FourierSlices dft_mode3(const Tensor3& a);
/// Throws SymmetryViolation when the inverse has a non-negligible imaginary part.
Tensor3 idft_mode3(const FourierSlices& f);

/// Largest dense block-circulant matrix (in entries) bcirc() will build.
inline constexpr Index kBcircMaxEntries = Index{4096} * 4096;

/// Dense (N1 N3) x (N2 N3) block-circulant matrix. Intended for oracles and
/// debugging; throws SizeOverflow above `max_entries`.
Eigen::MatrixXd bcirc(const Tensor3& a, Index max_entries = kBcircMaxEntries);
/// Frontal slices stacked top to bottom: (N1 N3) x N2.
Eigen::MatrixXd unfold(const Tensor3& a);
/// Inverse of unfold; throws ShapeMismatch if rows are not divisible by n3.
Tensor3 fold(const Eigen::MatrixXd& m, Index n3);

/// t-product of N1 x N2 x N3 and N2 x L x N3 tensors.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);
Tensor3 ttranspose(const Tensor3& a);
Tensor3 identity_tensor(Index n, Index n3);

enum class BasisKind { column, tube };

/// Standard tensor basis element. A column basis lives in N x 1 x N3 with its
/// unit entry at (index, 0, 0); a tube basis lives in 1 x 1 x N3 with its unit
/// entry at (0, 0, index).
struct TensorBasis {
    BasisKind kind = BasisKind::column;
    Index index = 0;
    Index n = 1;
    Index n3 = 1;
};

Tensor3 basis(const TensorBasis& b);

enum class NormKind { fro, l1, linf };

double norm(const Tensor3& a, NormKind kind = NormKind::fro);
double inner(const Tensor3& a, const Tensor3& b);

/// Relative Frobenius distance ||a - b|| / max(||b||, tiny).
double rel_error(const Tensor3& a, const Tensor3& b);

} // namespace rtpca
