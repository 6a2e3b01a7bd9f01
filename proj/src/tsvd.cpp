#include "rtpca/tsvd.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace rtpca {

namespace {

bool is_real_slice(Index k, Index n3) { return k == 0 || 2 * k == n3; }

// Real slices are decomposed in real arithmetic so their factors stay real
// and the mirrored spectrum remains exactly conjugate symmetric.
void slice_svd(const Eigen::MatrixXcd& m, bool real_slice, bool with_vectors,
               Eigen::MatrixXcd* u, Eigen::MatrixXcd* v, Eigen::VectorXd* s) {
    const unsigned opts = with_vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
    if (m.size() == 0) {
        s->resize(0);
        if (with_vectors) {
            u->resize(m.rows(), 0);
            v->resize(m.cols(), 0);
        }
        return;
    }
    if (real_slice) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m.real(), opts);
        if (svd.info() != Eigen::Success)
            throw ConvergenceFailure("tsvd", "real slice SVD did not converge");
        *s = svd.singularValues();
        if (with_vectors) {
            *u = svd.matrixU().cast<cplx>();
            *v = svd.matrixV().cast<cplx>();
        }
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, opts);
        if (svd.info() != Eigen::Success)
            throw ConvergenceFailure("tsvd", "complex slice SVD did not converge");
        *s = svd.singularValues();
        if (with_vectors) {
            *u = svd.matrixU();
            *v = svd.matrixV();
        }
    }
    if (!s->allFinite()) throw ConvergenceFailure("tsvd", "non-finite singular values");
}

FourierSlices empty_slices(Dims d) {
    FourierSlices f{d, std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(d.n3))};
    for (auto& s : f.slices) s = Eigen::MatrixXcd::Zero(d.n1, d.n2);
    return f;
}

// Spatial tube whose DFT coefficients are the i-th singular values of each slice.
std::vector<double> singular_tube(const FourierSvd& svd, Index i) {
    const Index n3 = svd.dims.n3;
    FourierSlices f = empty_slices(Dims{1, 1, n3});
    for (Index k = 0; k < f.independent(); ++k) {
        const auto& s = svd.sigma[static_cast<std::size_t>(k)];
        f.slices[static_cast<std::size_t>(k)](0, 0) = i < s.size() ? s(i) : 0.0;
    }
    f.mirror();
    const Tensor3 t = idft_mode3(f);
    return {t.data().begin(), t.data().end()};
}

double fourier_fro_sq(const FourierSvd& svd, const std::vector<double>& per_slice) {
    double acc = 0.0;
    for (Index k = 0; k < static_cast<Index>(per_slice.size()); ++k)
        acc += svd.weight(k) * per_slice[static_cast<std::size_t>(k)];
    return acc / static_cast<double>(svd.dims.n3);
}

} // namespace

Eigen::VectorXd FourierSvd::first_slice_diagonal() const {
    Index len = 0;
    for (const auto& s : sigma) len = std::max(len, s.size());
    Eigen::VectorXd d = Eigen::VectorXd::Zero(len);
    for (Index k = 0; k < static_cast<Index>(sigma.size()); ++k) {
        const auto& s = sigma[static_cast<std::size_t>(k)];
        d.head(s.size()) += weight(k) * s;
    }
    if (dims.n3 > 0) d /= static_cast<double>(dims.n3);
    return d;
}

double FourierSvd::max_singular_value() const {
    double m = 0.0;
    for (const auto& s : sigma)
        if (s.size() > 0) m = std::max(m, s.maxCoeff());
    return m;
}

FourierSvd fourier_svd(const FourierSlices& f, bool with_vectors) {
    FourierSvd out;
    out.dims = f.dims;
    const Index half = f.dims.n3 > 0 ? f.independent() : 0;
    out.sigma.resize(static_cast<std::size_t>(half));
    if (with_vectors) {
        out.U.resize(static_cast<std::size_t>(half));
        out.V.resize(static_cast<std::size_t>(half));
    }
    for (Index k = 0; k < half; ++k) {
        const auto s = static_cast<std::size_t>(k);
        slice_svd(f.slices[s], is_real_slice(k, f.dims.n3), with_vectors,
                  with_vectors ? &out.U[s] : nullptr, with_vectors ? &out.V[s] : nullptr,
                  &out.sigma[s]);
    }
    return out;
}

TSvdFactors tsvd_skinny(const Tensor3& a, double rank_tol) {
    if (rank_tol < 0) throw DomainError("tsvd_skinny", "rank_tol must be >= 0");
    const Dims d = a.dims();
    const FourierSvd svd = fourier_svd(dft_mode3(a), true);
    const Eigen::VectorXd first = svd.first_slice_diagonal();

    Index r = 0;
    if (first.size() > 0 && first(0) > 0.0) {
        const double cut = rank_tol * first(0);
        while (r < first.size() && first(r) > cut) ++r;
    }

    TSvdFactors out;
    out.rank = r;
    FourierSlices fu = empty_slices(Dims{d.n1, r, d.n3});
    FourierSlices fv = empty_slices(Dims{d.n2, r, d.n3});
    for (Index k = 0; k < fu.independent(); ++k) {
        const auto s = static_cast<std::size_t>(k);
        fu.slices[s] = svd.U[s].leftCols(r);
        fv.slices[s] = svd.V[s].leftCols(r);
    }
    fu.mirror();
    fv.mirror();
    out.U = idft_mode3(fu);
    out.V = idft_mode3(fv);
    out.S = Tensor3(Dims{r, r, d.n3});
    for (Index i = 0; i < r; ++i) {
        const auto tube = singular_tube(svd, i);
        for (Index k = 0; k < d.n3; ++k) out.S(i, i, k) = tube[static_cast<std::size_t>(k)];
    }
    return out;
}

Index tubal_rank(const Tensor3& a, double tol) {
    if (tol < 0) throw DomainError("tubal_rank", "tol must be >= 0");
    const Eigen::VectorXd first = fourier_svd(dft_mode3(a), false).first_slice_diagonal();
    if (first.size() == 0 || first(0) <= 0.0) return 0;
    Index r = 0;
    for (Index i = 0; i < first.size(); ++i)
        if (first(i) > tol * first(0)) ++r;
    return r;
}

Index tubal_rank_tubes(const Tensor3& a, double tol) {
    if (tol < 0) throw DomainError("tubal_rank_tubes", "tol must be >= 0");
    const FourierSvd svd = fourier_svd(dft_mode3(a), false);
    Index len = 0;
    for (const auto& s : svd.sigma) len = std::max(len, s.size());
    std::vector<double> tube_norm(static_cast<std::size_t>(len), 0.0);
    for (Index i = 0; i < len; ++i) {
        double acc = 0.0;
        for (double v : singular_tube(svd, i)) acc += v * v;
        tube_norm[static_cast<std::size_t>(i)] = std::sqrt(acc);
    }
    if (len == 0 || tube_norm[0] <= 0.0) return 0;
    Index r = 0;
    for (double n : tube_norm)
        if (n > tol * tube_norm[0]) ++r;
    return r;
}

double spectral_norm(const Tensor3& a) {
    return fourier_svd(dft_mode3(a), false).max_singular_value();
}

double nuclear_norm(const Tensor3& a) {
    return fourier_svd(dft_mode3(a), false).first_slice_diagonal().sum();
}

double tnn_zhang(const Tensor3& a) {
    const TSvdFactors f = tsvd_skinny(a);
    double acc = 0.0;
    for (Index k = 0; k < f.S.n3(); ++k)
        for (Index i = 0; i < f.rank; ++i) acc += f.S(i, i, k);
    return acc;
}

ProxOutput tsvt_prox_with_norms(const Tensor3& a, double tau) {
    if (!(tau >= 0)) throw DomainError("tsvt_prox", "tau must be >= 0");
    if (tau == 0.0) {
        ProxOutput out{a, nuclear_norm(a), 0.0};
        out.tnn_zhang = tnn_zhang(a);
        return out;
    }
    const Dims d = a.dims();
    const FourierSlices fa = dft_mode3(a);
    const FourierSvd svd = fourier_svd(fa, true);
    FourierSlices fz = empty_slices(d);
    double nuclear = 0.0;
    double dc_sum = 0.0;
    for (Index k = 0; k < fz.independent(); ++k) {
        const auto s = static_cast<std::size_t>(k);
        const Eigen::VectorXd shrunk = (svd.sigma[s].array() - tau).max(0.0).matrix();
        Index keep = 0;
        while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
        if (keep > 0)
            fz.slices[s].noalias() = svd.U[s].leftCols(keep) *
                                     shrunk.head(keep).cast<cplx>().asDiagonal() *
                                     svd.V[s].leftCols(keep).adjoint();
        nuclear += svd.weight(k) * shrunk.sum();
        if (k == 0) dc_sum = shrunk.sum();
    }
    fz.mirror();
    ProxOutput out;
    out.value = idft_mode3(fz);
    out.nuclear = d.n3 > 0 ? nuclear / static_cast<double>(d.n3) : 0.0;
    // sum_k S(i,i,k) is the DC coefficient of the singular tube, which is the
    // i-th singular value of the DC Fourier slice.
    out.tnn_zhang = dc_sum;
    return out;
}

Tensor3 tsvt_prox(const Tensor3& a, double tau) {
    if (!(tau >= 0)) throw DomainError("tsvt_prox", "tau must be >= 0");
    if (tau == 0.0) return a;
    return tsvt_prox_with_norms(a, tau).value;
}

SubgradientResidual subgradient_residual(const Tensor3& a, const Tensor3& g) {
    if (a.dims() != g.dims())
        throw ShapeMismatch("subgradient_member", to_string(a.dims()) + " vs " +
                                                      to_string(g.dims()));
    const FourierSvd svd = fourier_svd(dft_mode3(a), true);
    const FourierSlices fg = dft_mode3(g);
    const double cut = kDefaultRankTol * svd.max_singular_value();
    const Index half = g.n3() > 0 ? fg.independent() : 0;

    std::vector<double> u_sq(static_cast<std::size_t>(half), 0.0);
    std::vector<double> v_sq(static_cast<std::size_t>(half), 0.0);
    SubgradientResidual res;
    for (Index k = 0; k < half; ++k) {
        const auto s = static_cast<std::size_t>(k);
        Index r = 0;
        while (r < svd.sigma[s].size() && svd.sigma[s](r) > cut) ++r;
        const auto u = svd.U[s].leftCols(r);
        const auto v = svd.V[s].leftCols(r);
        const Eigen::MatrixXcd w = fg.slices[s] - u * v.adjoint();
        u_sq[s] = (u.adjoint() * w).squaredNorm();
        v_sq[s] = (w * v).squaredNorm();
        if (w.size() > 0) {
            Eigen::BDCSVD<Eigen::MatrixXcd> wsvd(w);
            res.w_spectral = std::max(res.w_spectral, wsvd.singularValues()(0));
        }
    }
    res.u_orth = std::sqrt(fourier_fro_sq(svd, u_sq));
    res.v_orth = std::sqrt(fourier_fro_sq(svd, v_sq));
    return res;
}

bool subgradient_member(const Tensor3& a, const Tensor3& g, double tol) {
    const SubgradientResidual r = subgradient_residual(a, g);
    const double scale = std::max(1.0, norm(g));
    return r.u_orth <= tol * scale && r.v_orth <= tol * scale && r.w_spectral <= 1.0 + tol;
}

} // namespace rtpca
