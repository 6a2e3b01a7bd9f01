#pragma once

// Deterministic exact-recovery certificates for X = L0 + E0: incoherence,
// support degrees, the identifiability constants xi(L0) and mu(E0), admissible
// ranges for the sparsity weight gamma, and an explicit dual certificate.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtpca/tangent.hpp"
#include "rtpca/tensor.hpp"

namespace rtpca {

struct XiBounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct GammaRange {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double gamma) const noexcept { return lo < gamma && gamma < hi; }
};

struct DegreeBounds {
    Index deg_min = 0;
    Index deg_max = 0;
};

struct UncertaintyAudit {
    double value = 0.0; // 2 inc(A) mu(A), an upper bound on xi(A) mu(A)
    bool pass = false;
};

/// max_n ||P * e_n||_F for a projector P (N x N x N3).
/// Throws NotAProjector if ||P * P - P||_F exceeds 1e-6 max(1, ||P||_F).
double beta_incoherence(const Tensor3& projector);

/// max(beta(span U), beta(span V)). Throws ZeroTensor for L = 0.
double inc(const Tensor3& l, double rank_tol = kDefaultRankTol);
double inc(const TangentBasis& t);

DegreeBounds deg_bounds(const SupportMask& m);

/// Exact mu(E): the spectral norm of the 0/1 indicator of the support.
double mu_exact(const SupportMask& m);

/// (inc / sqrt(N3), 2 inc). Throws ZeroTensor for L = 0.
XiBounds xi_bounds(const Tensor3& l);
XiBounds xi_bounds_from_inc(double inc_value, Index n3);

inline constexpr std::uint64_t kXiSeed = 0x9e37'79b9'7f4a'7c15ULL;

/// Lower bound on xi(L) from explicit feasible points of its defining
/// maximization: coherence-aligned seeds, random tangent directions and a
/// coordinate ascent. Every candidate is scaled to unit spectral norm.
double xi_lower_estimate(const TangentBasis& t, int samples, int iters,
                         std::uint64_t seed = kXiSeed);
double xi_lower_estimate(const Tensor3& l, int samples, int iters,
                         std::uint64_t seed = kXiSeed);

/// Admissible gamma interval when xi * mu < 1/6; absent otherwise.
std::optional<GammaRange> gamma_range_thm3(double xi, double mu);
/// (3 xi)^p / (2 mu)^(1 - p) for p in [0, 1].
double gamma_interp(double xi, double mu, double p);
/// Admissible gamma interval when inc * deg_max < 1/12; absent otherwise.
std::optional<GammaRange> gamma_range_cor3(double inc_value, Index deg_max);
/// (6 inc)^p / (2 deg_max)^(1 - p) for p in [0, 1].
double gamma_interp_cor3(double inc_value, Index deg_max, double p);

/// Checks 2 inc(A) mu(support A) >= 1 - 1e-9. Throws ZeroTensor for A = 0.
UncertaintyAudit uncertainty_audit(const Tensor3& a);

/// Dual tensor Q = (U * V^T + H_T) + (gamma sign(E0) + H_Omega) built by the
/// alternating fixed point H_T = -P_T(gamma sign(E0) + H_Omega),
/// H_Omega = -P_Omega(U * V^T + H_T).
struct DualCertificate {
    Tensor3 Q;
    Tensor3 H_T;
    Tensor3 H_Omega;
    double spectral_slack = 0.0; // 1 - ||P_Tperp(Q)||
    double linf_slack = 0.0;     // gamma - ||P_Omega^c(Q)||_inf
    double t_residual = 0.0;     // ||P_T(Q) - U * V^T||_F
    double omega_residual = 0.0; // ||P_Omega(Q) - gamma sign(E0)||_F
    int iterations = 0;
    bool converged = false;
    std::vector<double> changes; // per-iteration update size

    /// Converged with both slacks above the strictness margin.
    bool certified(double margin = kSlackMargin) const noexcept {
        return converged && spectral_slack > margin && linf_slack > margin;
    }

    static constexpr double kSlackMargin = 1e-7;
};

/// Throws NonConvergence when the iteration stops contracting. Returns with
/// converged = false when it is still contracting at `max_iters`.
DualCertificate dual_certificate(const TangentBasis& t, const SupportMask& support,
                                 const Tensor3& sign, double gamma, int max_iters = 1000,
                                 double tol = 1e-12);
DualCertificate dual_certificate(const Tensor3& l0, const Tensor3& e0, double gamma,
                                 int max_iters = 1000, double tol = 1e-12);

struct CertifyOptions {
    double rank_tol = kDefaultRankTol;
    double support_tol = 0.0;
    int xi_samples = 8;
    int xi_iters = 8;
    std::uint64_t seed = kXiSeed;
    std::optional<double> gamma; // otherwise interpolated at p
    double p = 0.5;
    bool run_dual = true;
    int dual_max_iters = 1000;
    double dual_tol = 1e-12;
    int gauge_iters = 500;
    double gauge_tol = 1e-8;
};

struct CertificateReport {
    Dims dims;
    Index rank = 0;
    Index support_size = 0;
    double inc = 0.0;
    double beta_U = 0.0;
    double beta_V = 0.0;
    double xi_lower = 0.0;
    double xi_estimate = 0.0;
    double xi_upper = 0.0;
    double mu = 0.0;
    Index deg_min = 0;
    Index deg_max = 0;
    double product_condition = 0.0; // xi_upper * mu
    double cor3_condition = 0.0;    // inc * deg_max
    std::optional<GammaRange> gamma_range;      // from (xi_upper, mu)
    std::optional<GammaRange> gamma_range_cor3; // from (inc, deg_max)
    std::optional<double> gamma;
    std::optional<double> gauge;
    std::string gauge_error;
    std::optional<DualCertificate> dual;
    std::string dual_error;

    bool thm3_ok() const noexcept { return gamma_range.has_value(); }
    bool cor3_ok() const noexcept { return gamma_range_cor3.has_value(); }
    bool dual_ok() const noexcept {
        return dual.has_value() && dual->certified() && gauge.has_value() && *gauge < 1.0;
    }
};

CertificateReport certify(const Tensor3& l0, const Tensor3& e0, const CertifyOptions& opts = {});

/// "key: value" lines.
void write_report(std::ostream& out, const CertificateReport& r);

} // namespace rtpca
