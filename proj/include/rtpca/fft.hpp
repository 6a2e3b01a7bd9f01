#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rtpca {

using cplx = std::complex<double>;

/// Precomputed discrete Fourier transform of a fixed length.
///
/// Any length is accepted. Short lengths use a direct twiddle table, powers of
/// two use an iterative radix-2 kernel and everything else goes through
/// Bluestein's chirp-z reduction to a power-of-two convolution.
///
/// The forward transform is unnormalized, X[k] = sum_j x[j] exp(-2 pi i jk/n);
/// the inverse carries the 1/n factor.
class DftPlan {
public:
    explicit DftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    void inverse(std::span<const cplx> in, std::span<cplx> out) const;

private:
    enum class Kind { direct, radix2, bluestein };

    void transform(std::span<const cplx> in, std::span<cplx> out,
                   bool inverse) const;
    void radix2_inplace(std::span<cplx> data, bool inverse) const;

    std::size_t n_;
    Kind kind_;
    std::vector<cplx> twiddle_; // exp(-2 pi i j / n), j < n

    // Bluestein state
    std::size_t m_ = 0;
    std::vector<cplx> chirp_;        // exp(-i pi j^2 / n)
    std::vector<cplx> chirp_fft_;    // FFT_m of conj(chirp) wrapped
    std::vector<cplx> m_twiddle_;    // twiddles for the size-m radix-2 kernel
};

} // namespace rtpca
