#include "rtpca/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtpca/fft.hpp"

namespace rtpca {

std::string to_string(const Dims& d) {
    return std::to_string(d.n1) + "x" + std::to_string(d.n2) + "x" +
           std::to_string(d.n3);
}

namespace {

void require_valid_dims(const Dims& d, const char* op) {
    if (d.n1 < 0 || d.n2 < 0 || d.n3 < 0)
        throw ShapeMismatch(op, "negative dimension " + to_string(d));
}

void require_same_dims(const Tensor3& a, const Tensor3& b, const char* op) {
    if (a.dims() != b.dims())
        throw ShapeMismatch(op, to_string(a.dims()) + " vs " + to_string(b.dims()));
}

} // namespace

Tensor3::Tensor3(Dims dims) : dims_(dims) {
    require_valid_dims(dims, "Tensor3");
    data_.assign(static_cast<std::size_t>(dims.size()), 0.0);
}

Tensor3::Tensor3(Dims dims, std::vector<double> data)
    : dims_(dims), data_(std::move(data)) {
    require_valid_dims(dims, "Tensor3");
    if (static_cast<Index>(data_.size()) != dims.size())
        throw ShapeMismatch("Tensor3", "expected " + std::to_string(dims.size()) +
                                           " values, got " +
                                           std::to_string(data_.size()));
    for (double v : data_)
        if (!std::isfinite(v)) throw InvalidValue("Tensor3", "non-finite entry");
}

Tensor3 Tensor3::constant(Dims dims, double value) {
    Tensor3 t(dims);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

double Tensor3::at(Index i, Index j, Index k) const {
    if (i < 0 || j < 0 || k < 0 || i >= dims_.n1 || j >= dims_.n2 || k >= dims_.n3)
        throw IndexOutOfRange("Tensor3::at", "(" + std::to_string(i) + "," +
                                                 std::to_string(j) + "," +
                                                 std::to_string(k) + ") in " +
                                                 to_string(dims_));
    return (*this)(i, j, k);
}

Eigen::MatrixXd Tensor3::frontal_slice(Index k) const {
    Eigen::MatrixXd m(dims_.n1, dims_.n2);
    for (Index i = 0; i < dims_.n1; ++i)
        for (Index j = 0; j < dims_.n2; ++j) m(i, j) = (*this)(i, j, k);
    return m;
}

void Tensor3::set_frontal_slice(Index k, const Eigen::MatrixXd& m) {
    if (m.rows() != dims_.n1 || m.cols() != dims_.n2)
        throw ShapeMismatch("Tensor3::set_frontal_slice", "slice shape");
    for (Index i = 0; i < dims_.n1; ++i)
        for (Index j = 0; j < dims_.n2; ++j) (*this)(i, j, k) = m(i, j);
}

bool Tensor3::is_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
    require_same_dims(*this, o, "Tensor3::operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
    require_same_dims(*this, o, "Tensor3::operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

void FourierSlices::mirror() {
    const Index n3 = dims.n3;
    for (Index k = independent(); k < n3; ++k)
        slices[static_cast<std::size_t>(k)] =
            slices[static_cast<std::size_t>(n3 - k)].conjugate();
}

FourierSlices dft_mode3(const Tensor3& a) {
    const Dims d = a.dims();
    FourierSlices f{d, std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(d.n3))};
    for (auto& s : f.slices) s.resize(d.n1, d.n2);
    if (d.size() == 0) return f;

    const DftPlan plan(static_cast<std::size_t>(d.n3));
    const Index half = f.independent();
    const bool has_nyquist = d.n3 % 2 == 0;
    std::vector<cplx> in(static_cast<std::size_t>(d.n3));
    std::vector<cplx> out(static_cast<std::size_t>(d.n3));
    for (Index i = 0; i < d.n1; ++i) {
        for (Index j = 0; j < d.n2; ++j) {
            auto tube = a.tube(i, j);
            std::copy(tube.begin(), tube.end(), in.begin());
            plan.forward(in, out);
            // DC and Nyquist coefficients of a real tube are real.
            out[0].imag(0.0);
            if (has_nyquist) out[static_cast<std::size_t>(d.n3 / 2)].imag(0.0);
            for (Index k = 0; k < half; ++k)
                f.slices[static_cast<std::size_t>(k)](i, j) = out[static_cast<std::size_t>(k)];
        }
    }
    f.mirror();
    return f;
}

Tensor3 idft_mode3(const FourierSlices& f) {
    const Dims d = f.dims;
    if (static_cast<Index>(f.slices.size()) != d.n3)
        throw ShapeMismatch("idft_mode3", "slice count does not match n3");
    for (const auto& s : f.slices)
        if (s.rows() != d.n1 || s.cols() != d.n2)
            throw ShapeMismatch("idft_mode3", "slice shape does not match dims");

    Tensor3 out(d);
    if (d.size() == 0) return out;
    const DftPlan plan(static_cast<std::size_t>(d.n3));
    std::vector<cplx> in(static_cast<std::size_t>(d.n3));
    std::vector<cplx> res(static_cast<std::size_t>(d.n3));
    double max_imag = 0.0;
    double max_abs = 0.0;
    for (Index i = 0; i < d.n1; ++i) {
        for (Index j = 0; j < d.n2; ++j) {
            for (Index k = 0; k < d.n3; ++k)
                in[static_cast<std::size_t>(k)] = f.slices[static_cast<std::size_t>(k)](i, j);
            plan.inverse(in, res);
            for (Index k = 0; k < d.n3; ++k) {
                const cplx v = res[static_cast<std::size_t>(k)];
                out(i, j, k) = v.real();
                max_imag = std::max(max_imag, std::abs(v.imag()));
                max_abs = std::max(max_abs, std::abs(v));
            }
        }
    }
    if (!(max_imag <= 1e-9 * max_abs))
        throw SymmetryViolation("idft_mode3",
                                "imaginary residue " + std::to_string(max_imag) +
                                    " exceeds tolerance; Fourier data is not "
                                    "conjugate symmetric");
    return out;
}

Eigen::MatrixXd bcirc(const Tensor3& a, Index max_entries) {
    const Dims d = a.dims();
    const Index rows = d.n1 * d.n3;
    const Index cols = d.n2 * d.n3;
    if (rows != 0 && cols > max_entries / rows)
        throw SizeOverflow("bcirc", std::to_string(rows) + "x" + std::to_string(cols) +
                                        " exceeds the dense materialization cap");
    Eigen::MatrixXd m(rows, cols);
    for (Index bi = 0; bi < d.n3; ++bi) {
        for (Index bj = 0; bj < d.n3; ++bj) {
            const Index k = ((bi - bj) % d.n3 + d.n3) % d.n3;
            for (Index i = 0; i < d.n1; ++i)
                for (Index j = 0; j < d.n2; ++j)
                    m(bi * d.n1 + i, bj * d.n2 + j) = a(i, j, k);
        }
    }
    return m;
}

Eigen::MatrixXd unfold(const Tensor3& a) {
    const Dims d = a.dims();
    Eigen::MatrixXd m(d.n1 * d.n3, d.n2);
    for (Index k = 0; k < d.n3; ++k)
        for (Index i = 0; i < d.n1; ++i)
            for (Index j = 0; j < d.n2; ++j) m(k * d.n1 + i, j) = a(i, j, k);
    return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, Index n3) {
    if (n3 <= 0 || m.rows() % n3 != 0)
        throw ShapeMismatch("fold", std::to_string(m.rows()) +
                                        " rows not divisible by n3=" + std::to_string(n3));
    const Index n1 = m.rows() / n3;
    Tensor3 t(Dims{n1, m.cols(), n3});
    for (Index k = 0; k < n3; ++k)
        for (Index i = 0; i < n1; ++i)
            for (Index j = 0; j < m.cols(); ++j) t(i, j, k) = m(k * n1 + i, j);
    for (double v : t.data())
        if (!std::isfinite(v)) throw InvalidValue("fold", "non-finite entry");
    return t;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3())
        throw ShapeMismatch("tprod", to_string(a.dims()) + " * " + to_string(b.dims()));
    const FourierSlices fa = dft_mode3(a);
    const FourierSlices fb = dft_mode3(b);
    FourierSlices fc{Dims{a.n1(), b.n2(), a.n3()},
                     std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(a.n3()))};
    for (Index k = 0; k < fc.independent() && k < a.n3(); ++k) {
        const auto s = static_cast<std::size_t>(k);
        fc.slices[s].noalias() = fa.slices[s] * fb.slices[s];
    }
    fc.mirror();
    return idft_mode3(fc);
}

Tensor3 ttranspose(const Tensor3& a) {
    const Dims d = a.dims();
    Tensor3 t(Dims{d.n2, d.n1, d.n3});
    for (Index k = 0; k < d.n3; ++k) {
        const Index src = (d.n3 - k) % d.n3;
        for (Index i = 0; i < d.n1; ++i)
            for (Index j = 0; j < d.n2; ++j) t(j, i, k) = a(i, j, src);
    }
    return t;
}

Tensor3 identity_tensor(Index n, Index n3) {
    if (n < 0 || n3 <= 0) throw IndexOutOfRange("identity_tensor", "bad size");
    Tensor3 t(Dims{n, n, n3});
    for (Index i = 0; i < n; ++i) t(i, i, 0) = 1.0;
    return t;
}

Tensor3 basis(const TensorBasis& b) {
    if (b.n3 <= 0) throw IndexOutOfRange("basis", "n3 must be positive");
    if (b.kind == BasisKind::column) {
        if (b.index < 0 || b.index >= b.n)
            throw IndexOutOfRange("basis", "column index " + std::to_string(b.index) +
                                               " outside [0," + std::to_string(b.n) + ")");
        Tensor3 t(Dims{b.n, 1, b.n3});
        t(b.index, 0, 0) = 1.0;
        return t;
    }
    if (b.index < 0 || b.index >= b.n3)
        throw IndexOutOfRange("basis", "tube index " + std::to_string(b.index) +
                                           " outside [0," + std::to_string(b.n3) + ")");
    Tensor3 t(Dims{1, 1, b.n3});
    t(0, 0, b.index) = 1.0;
    return t;
}

double norm(const Tensor3& a, NormKind kind) {
    double acc = 0.0;
    switch (kind) {
    case NormKind::fro:
        for (double v : a.data()) acc += v * v;
        return std::sqrt(acc);
    case NormKind::l1:
        for (double v : a.data()) acc += std::abs(v);
        return acc;
    case NormKind::linf:
        for (double v : a.data()) acc = std::max(acc, std::abs(v));
        return acc;
    }
    return acc;
}

double inner(const Tensor3& a, const Tensor3& b) {
    require_same_dims(a, b, "inner");
    double acc = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double rel_error(const Tensor3& a, const Tensor3& b) {
    const double denom = std::max(norm(b), std::numeric_limits<double>::min());
    return norm(a - b) / denom;
}

} // namespace rtpca
