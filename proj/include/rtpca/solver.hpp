#pragma once

// ADMM for min ||L||_* + gamma R(E) subject to X = L + E, where R is the
// entrywise l1 norm, the sum of tube l2 norms, or the sum of lateral-slice
// Frobenius norms.

#include <optional>
#include <string>
#include <vector>

#include "rtpca/errors.hpp"
#include "rtpca/tensor.hpp"

namespace rtpca {

enum class Penalty { l1, tube_112, slice_21 };

const char* to_string(Penalty p) noexcept;
/// Accepts "l1", "tube", "tube_112", "slice", "slice_21".
Penalty parse_penalty(const std::string& name);

struct SolverConfig {
    std::optional<double> gamma; // empty: default_gamma(penalty, dims)
    Penalty penalty = Penalty::l1;
    double rho0 = 1e-3;
    double rho_scale = 1.1;
    double rho_max = 1e10;
    double tol = 1e-8;
    int max_iters = 500;
};

struct SolverResult {
    Tensor3 L;
    Tensor3 E;
    int iterations = 0;
    double primal_residual = 0.0; // ||X - L - E||_F / ||X||_F
    double dual_residual = 0.0;   // rho ||E_k - E_{k-1}||_F / ||X||_F, logged only
    double gamma = 0.0;
    std::vector<double> objective_trace;
};

class MaxItersExceeded : public Error {
public:
    MaxItersExceeded(SolverResult partial)
        : Error("rtpca", "no convergence after " + std::to_string(partial.iterations) +
                             " iterations, residual " + std::to_string(partial.primal_residual)),
          partial_(std::move(partial)) {}

    const SolverResult& partial() const noexcept { return partial_; }

private:
    SolverResult partial_;
};

/// l1: 1/sqrt(max(N1, N2) N3). tube_112: 1/max(N1, N2). slice_21: 1/ln(N2),
/// which needs N2 >= 2.
double default_gamma(Penalty penalty, const Dims& dims);

/// Proximal map of tau R(.) for the chosen penalty.
Tensor3 prox_sparse(const Tensor3& e, double tau, Penalty penalty);

/// Value of the sparse regularizer R(E).
double sparse_norm(const Tensor3& e, Penalty penalty);

/// nuclear_norm(L) + gamma R(E) for l1; the tube and slice models use
/// tnn_zhang(L) for the low-rank term.
double objective(const Tensor3& l, const Tensor3& e, double gamma, Penalty penalty);

/// Throws DomainError on an invalid config and MaxItersExceeded when the
/// residual is still above tol after max_iters.
SolverResult rtpca(const Tensor3& x, const SolverConfig& cfg = {});

} // namespace rtpca
