#include "rtpca/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rtpca {

namespace {

constexpr std::size_t kDirectMax = 16;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<cplx> make_twiddles(std::size_t n) {
    std::vector<cplx> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(n);
        w[j] = {std::cos(angle), std::sin(angle)};
    }
    return w;
}

// In-place iterative Cooley-Tukey; `w` holds exp(-2 pi i j / n).
void radix2(std::span<cplx> a, const std::vector<cplx>& w, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx tw = w[k * step];
                if (inverse) tw = std::conj(tw);
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * tw;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

} // namespace

DftPlan::DftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("DftPlan: length must be positive");
    twiddle_ = make_twiddles(n);
    if (n <= kDirectMax) {
        kind_ = Kind::direct;
    } else if (is_pow2(n)) {
        kind_ = Kind::radix2;
    } else {
        kind_ = Kind::bluestein;
        m_ = 1;
        while (m_ < 2 * n - 1) m_ <<= 1;
        m_twiddle_ = make_twiddles(m_);
        chirp_.resize(n);
        const std::size_t two_n = 2 * n;
        for (std::size_t j = 0; j < n; ++j) {
            // j^2 mod 2n keeps the phase argument small for long transforms
            const std::size_t jj = (j * j) % two_n;
            const double angle = -std::numbers::pi * static_cast<double>(jj) /
                                 static_cast<double>(n);
            chirp_[j] = {std::cos(angle), std::sin(angle)};
        }
        chirp_fft_.assign(m_, cplx{});
        chirp_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n; ++j) {
            chirp_fft_[j] = std::conj(chirp_[j]);
            chirp_fft_[m_ - j] = std::conj(chirp_[j]);
        }
        radix2(chirp_fft_, m_twiddle_, false);
    }
}

void DftPlan::forward(std::span<const cplx> in, std::span<cplx> out) const {
    transform(in, out, false);
}

void DftPlan::inverse(std::span<const cplx> in, std::span<cplx> out) const {
    transform(in, out, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v *= scale;
}

void DftPlan::radix2_inplace(std::span<cplx> data, bool inverse) const {
    radix2(data, data.size() == n_ ? twiddle_ : m_twiddle_, inverse);
}

void DftPlan::transform(std::span<const cplx> in, std::span<cplx> out,
                        bool inverse) const {
    if (in.size() != n_ || out.size() != n_)
        throw std::invalid_argument("DftPlan: span length mismatch");

    switch (kind_) {
    case Kind::direct: {
        cplx buf[kDirectMax];
        for (std::size_t k = 0; k < n_; ++k) {
            cplx acc{};
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                const cplx w = inverse ? std::conj(twiddle_[idx]) : twiddle_[idx];
                acc += in[j] * w;
                idx += k;
                if (idx >= n_) idx -= n_;
            }
            buf[k] = acc;
        }
        for (std::size_t k = 0; k < n_; ++k) out[k] = buf[k];
        return;
    }
    case Kind::radix2: {
        std::vector<cplx> buf(in.begin(), in.end());
        radix2_inplace(buf, inverse);
        for (std::size_t k = 0; k < n_; ++k) out[k] = buf[k];
        return;
    }
    case Kind::bluestein: {
        // The inverse is conj(F(conj(x))); run the forward chirp on conj input.
        std::vector<cplx> a(m_, cplx{});
        for (std::size_t j = 0; j < n_; ++j) {
            const cplx x = inverse ? std::conj(in[j]) : in[j];
            a[j] = x * chirp_[j];
        }
        radix2_inplace(a, false);
        for (std::size_t j = 0; j < m_; ++j) a[j] *= chirp_fft_[j];
        radix2_inplace(a, true);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx v = a[k] * scale * chirp_[k];
            out[k] = inverse ? std::conj(v) : v;
        }
        return;
    }
    }
}

} // namespace rtpca
