#include "rtpca/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rtpca {

namespace {

std::vector<Eigen::MatrixXcd> independent_slices(const Tensor3& t) {
    FourierSlices f = dft_mode3(t);
    f.slices.resize(static_cast<std::size_t>(t.n3() > 0 ? f.independent() : 0));
    return std::move(f.slices);
}

template <class SliceFn>
Tensor3 map_fourier(const Tensor3& a, SliceFn&& fn) {
    FourierSlices f = dft_mode3(a);
    for (Index k = 0; k < f.independent() && k < a.n3(); ++k)
        fn(static_cast<std::size_t>(k), f.slices[static_cast<std::size_t>(k)]);
    f.mirror();
    return idft_mode3(f);
}

void require_ambient(const TangentBasis& t, const Tensor3& a, const char* op) {
    if (a.dims() != t.ambient())
        throw ShapeMismatch(op, to_string(a.dims()) + " vs tangent space " +
                                    to_string(t.ambient()));
}

} // namespace

TangentBasis TangentBasis::from_factors(Tensor3 u, Tensor3 v) {
    if (u.n2() != v.n2() || u.n3() != v.n3())
        throw ShapeMismatch("TangentBasis", to_string(u.dims()) + " and " + to_string(v.dims()));
    TangentBasis t;
    t.ubar_ = independent_slices(u);
    t.vbar_ = independent_slices(v);
    const Index r = u.n2();
    for (std::size_t k = 0; k < t.ubar_.size(); ++k) {
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(r, r);
        if ((t.ubar_[k].adjoint() * t.ubar_[k] - id).norm() > 1e-8 ||
            (t.vbar_[k].adjoint() * t.vbar_[k] - id).norm() > 1e-8)
            throw DomainError("TangentBasis", "factors are not orthonormal");
    }
    t.pu_ = tprod(u, ttranspose(u));
    t.pv_ = tprod(v, ttranspose(v));
    t.u_ = std::move(u);
    t.v_ = std::move(v);
    return t;
}

Tensor3 TangentBasis::polar() const { return tprod(u_, ttranspose(v_)); }

TangentBasis tangent_of(const Tensor3& l, double rank_tol) {
    TSvdFactors f = tsvd_skinny(l, rank_tol);
    return TangentBasis::from_factors(std::move(f.U), std::move(f.V));
}

Tensor3 project_T(const TangentBasis& t, const Tensor3& a) {
    require_ambient(t, a, "project_T");
    return map_fourier(a, [&](std::size_t k, Eigen::MatrixXcd& s) {
        const auto& u = t.u_slices()[k];
        const auto& v = t.v_slices()[k];
        const Eigen::MatrixXcd ua = u.adjoint() * s;
        const Eigen::MatrixXcd av = s * v;
        const Eigen::MatrixXcd uav = ua * v;
        s.noalias() = u * ua;
        s.noalias() += av * v.adjoint();
        s.noalias() -= u * uav * v.adjoint();
    });
}

Tensor3 project_T_perp(const TangentBasis& t, const Tensor3& a) {
    require_ambient(t, a, "project_T_perp");
    return map_fourier(a, [&](std::size_t k, Eigen::MatrixXcd& s) {
        const auto& u = t.u_slices()[k];
        const auto& v = t.v_slices()[k];
        const Eigen::MatrixXcd ua = u.adjoint() * s;
        s.noalias() -= u * ua;
        const Eigen::MatrixXcd bv = s * v;
        s.noalias() -= bv * v.adjoint();
    });
}

SupportMask::SupportMask(Dims dims, std::vector<std::uint8_t> mask)
    : dims_(dims), mask_(std::move(mask)),
      horizontal_(static_cast<std::size_t>(dims.n1), 0),
      lateral_(static_cast<std::size_t>(dims.n2), 0) {
    if (static_cast<Index>(mask_.size()) != dims.size())
        throw ShapeMismatch("SupportMask", "mask length does not match " + to_string(dims));
    for (Index i = 0; i < dims.n1; ++i)
        for (Index j = 0; j < dims.n2; ++j)
            for (Index k = 0; k < dims.n3; ++k)
                if ((*this)(i, j, k)) {
                    ++horizontal_[static_cast<std::size_t>(i)];
                    ++lateral_[static_cast<std::size_t>(j)];
                    ++count_;
                }
}

SupportMask SupportMask::empty(Dims dims) {
    return {dims, std::vector<std::uint8_t>(static_cast<std::size_t>(dims.size()), 0)};
}

SupportMask SupportMask::full(Dims dims) {
    return {dims, std::vector<std::uint8_t>(static_cast<std::size_t>(dims.size()), 1)};
}

Tensor3 SupportMask::indicator() const {
    Tensor3 t(dims_);
    auto out = t.data();
    for (std::size_t i = 0; i < mask_.size(); ++i) out[i] = mask_[i] ? 1.0 : 0.0;
    return t;
}

SupportMask support_of(const Tensor3& e, double tol) {
    if (!(tol >= 0)) throw DomainError("support_of", "tol must be >= 0");
    std::vector<std::uint8_t> m(static_cast<std::size_t>(e.size()));
    auto d = e.data();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(d[i]) > tol ? 1 : 0;
    return {e.dims(), std::move(m)};
}

Tensor3 sign_of(const Tensor3& e) {
    Tensor3 s(e.dims());
    auto in = e.data();
    auto out = s.data();
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = in[i] > 0 ? 1.0 : (in[i] < 0 ? -1.0 : 0.0);
    return s;
}

Tensor3 project_omega(const SupportMask& m, const Tensor3& a) {
    if (m.dims() != a.dims())
        throw ShapeMismatch("project_omega", to_string(m.dims()) + " vs " + to_string(a.dims()));
    Tensor3 r(a.dims());
    auto in = a.data();
    auto out = r.data();
    auto mask = m.mask();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = mask[i] ? in[i] : 0.0;
    return r;
}

Tensor3 project_omega_comp(const SupportMask& m, const Tensor3& a) {
    if (m.dims() != a.dims())
        throw ShapeMismatch("project_omega_comp",
                            to_string(m.dims()) + " vs " + to_string(a.dims()));
    Tensor3 r(a.dims());
    auto in = a.data();
    auto out = r.data();
    auto mask = m.mask();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = mask[i] ? 0.0 : in[i];
    return r;
}

double transversality_gauge(const TangentBasis& t, const SupportMask& m, int iters, double tol,
                            std::uint64_t seed) {
    if (iters < 1) throw DomainError("transversality_gauge", "iters must be >= 1");
    if (m.dims() != t.ambient())
        throw ShapeMismatch("transversality_gauge", "mask and tangent space shapes differ");
    if (m.count() == 0 || t.rank() == 0) return 0.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Tensor3 x(t.ambient());
    for (double& v : x.data()) v = gauss(rng);
    x = project_T(t, x);
    double nx = norm(x);
    if (nx == 0.0) return 0.0;
    x *= 1.0 / nx;

    double lambda = -1.0;
    for (int it = 0; it < iters; ++it) {
        Tensor3 y = project_T(t, project_omega(m, x));
        const double rq = inner(x, y);
        const double ny = norm(y);
        if (ny == 0.0) return 0.0;
        const bool done = std::abs(rq - lambda) <= tol;
        lambda = rq;
        if (done) return std::sqrt(std::clamp(lambda, 0.0, 1.0));
        x = std::move(y);
        x *= 1.0 / ny;
    }
    throw NonConvergence("transversality_gauge",
                         "Rayleigh quotient did not settle within " + std::to_string(iters) +
                             " iterations");
}

} // namespace rtpca
