#include "rtpca/solver.hpp"

#include <algorithm>
#include <cmath>

#include "rtpca/tsvd.hpp"

namespace rtpca {

namespace {

double shrink_factor(double norm_value, double tau) {
    return norm_value > tau ? 1.0 - tau / norm_value : 0.0;
}

void validate(const SolverConfig& cfg) {
    if (cfg.gamma && !(*cfg.gamma > 0.0)) throw DomainError("rtpca", "gamma must be positive");
    if (!(cfg.rho0 > 0.0)) throw DomainError("rtpca", "rho0 must be positive");
    if (!(cfg.rho_scale > 1.0)) throw DomainError("rtpca", "rho_scale must exceed 1");
    if (!(cfg.rho_max >= cfg.rho0)) throw DomainError("rtpca", "rho_max must be >= rho0");
    if (!(cfg.tol > 0.0)) throw DomainError("rtpca", "tol must be positive");
    if (cfg.max_iters < 1) throw DomainError("rtpca", "max_iters must be >= 1");
}

} // namespace

const char* to_string(Penalty p) noexcept {
    switch (p) {
    case Penalty::l1: return "l1";
    case Penalty::tube_112: return "tube";
    case Penalty::slice_21: return "slice";
    }
    return "?";
}

Penalty parse_penalty(const std::string& name) {
    if (name == "l1") return Penalty::l1;
    if (name == "tube" || name == "tube_112") return Penalty::tube_112;
    if (name == "slice" || name == "slice_21") return Penalty::slice_21;
    throw DomainError("parse_penalty", "unknown penalty '" + name + "'");
}

double default_gamma(Penalty penalty, const Dims& dims) {
    if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1)
        throw DomainError("default_gamma", "dims must be positive, got " + to_string(dims));
    const double nmax = static_cast<double>(std::max(dims.n1, dims.n2));
    switch (penalty) {
    case Penalty::l1: return 1.0 / std::sqrt(nmax * static_cast<double>(dims.n3));
    case Penalty::tube_112: return 1.0 / nmax;
    case Penalty::slice_21:
        if (dims.n2 < 2) throw DomainError("default_gamma", "slice penalty needs N2 >= 2");
        return 1.0 / std::log(static_cast<double>(dims.n2));
    }
    return 0.0;
}

Tensor3 prox_sparse(const Tensor3& e, double tau, Penalty penalty) {
    if (!(tau >= 0.0)) throw DomainError("prox_sparse", "tau must be >= 0");
    Tensor3 out = e;
    if (tau == 0.0) return out;
    switch (penalty) {
    case Penalty::l1:
        for (double& v : out.data()) v = std::copysign(std::max(std::abs(v) - tau, 0.0), v);
        break;
    case Penalty::tube_112:
        for (Index i = 0; i < e.n1(); ++i)
            for (Index j = 0; j < e.n2(); ++j) {
                double sq = 0.0;
                for (double v : e.tube(i, j)) sq += v * v;
                const double f = shrink_factor(std::sqrt(sq), tau);
                for (Index k = 0; k < e.n3(); ++k) out(i, j, k) *= f;
            }
        break;
    case Penalty::slice_21:
        for (Index j = 0; j < e.n2(); ++j) {
            double sq = 0.0;
            for (Index i = 0; i < e.n1(); ++i)
                for (double v : e.tube(i, j)) sq += v * v;
            const double f = shrink_factor(std::sqrt(sq), tau);
            for (Index i = 0; i < e.n1(); ++i)
                for (Index k = 0; k < e.n3(); ++k) out(i, j, k) *= f;
        }
        break;
    }
    return out;
}

double sparse_norm(const Tensor3& e, Penalty penalty) {
    double acc = 0.0;
    switch (penalty) {
    case Penalty::l1: return norm(e, NormKind::l1);
    case Penalty::tube_112:
        for (Index i = 0; i < e.n1(); ++i)
            for (Index j = 0; j < e.n2(); ++j) {
                double sq = 0.0;
                for (double v : e.tube(i, j)) sq += v * v;
                acc += std::sqrt(sq);
            }
        return acc;
    case Penalty::slice_21:
        for (Index j = 0; j < e.n2(); ++j) {
            double sq = 0.0;
            for (Index i = 0; i < e.n1(); ++i)
                for (double v : e.tube(i, j)) sq += v * v;
            acc += std::sqrt(sq);
        }
        return acc;
    }
    return acc;
}

double objective(const Tensor3& l, const Tensor3& e, double gamma, Penalty penalty) {
    if (l.dims() != e.dims())
        throw ShapeMismatch("objective", to_string(l.dims()) + " vs " + to_string(e.dims()));
    if (l.size() == 0) return 0.0;
    const double low = penalty == Penalty::l1 ? nuclear_norm(l) : tnn_zhang(l);
    return low + gamma * sparse_norm(e, penalty);
}

SolverResult rtpca(const Tensor3& x, const SolverConfig& cfg) {
    validate(cfg);
    SolverResult res;
    res.L = Tensor3(x.dims());
    res.E = Tensor3(x.dims());
    if (x.size() == 0 || x.is_zero()) {
        res.gamma = cfg.gamma.value_or(0.0);
        return res;
    }
    res.gamma = cfg.gamma ? *cfg.gamma : default_gamma(cfg.penalty, x.dims());

    const double xnorm = norm(x);
    Tensor3 y(x.dims());
    double rho = cfg.rho0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        Tensor3 target = x - res.E;
        target -= (1.0 / rho) * y;
        ProxOutput p = tsvt_prox_with_norms(target, 1.0 / rho);
        res.L = std::move(p.value);

        target = x - res.L;
        target -= (1.0 / rho) * y;
        Tensor3 e_next = prox_sparse(target, res.gamma / rho, cfg.penalty);
        res.dual_residual = rho * norm(e_next - res.E) / xnorm;
        res.E = std::move(e_next);

        Tensor3 gap = res.L + res.E;
        gap -= x;
        res.primal_residual = norm(gap) / xnorm;
        y += rho * gap;
        rho = std::min(rho * cfg.rho_scale, cfg.rho_max);

        const double low = cfg.penalty == Penalty::l1 ? p.nuclear : p.tnn_zhang;
        res.objective_trace.push_back(low + res.gamma * sparse_norm(res.E, cfg.penalty));
        res.iterations = it;
        if (!std::isfinite(res.primal_residual))
            throw ConvergenceFailure("rtpca", "iterate became non-finite");
        if (res.primal_residual <= cfg.tol) return res;
    }
    throw MaxItersExceeded(std::move(res));
}

} // namespace rtpca
