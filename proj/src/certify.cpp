#include "rtpca/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace rtpca {

namespace {

constexpr double kProjectorTol = 1e-6;

// ||P(:, n, :)||_F, which equals ||P * e_n||_F.
std::vector<double> lateral_norms(const Tensor3& p) {
    std::vector<double> out(static_cast<std::size_t>(p.n2()), 0.0);
    for (Index i = 0; i < p.n1(); ++i)
        for (Index j = 0; j < p.n2(); ++j)
            for (double v : p.tube(i, j)) out[static_cast<std::size_t>(j)] += v * v;
    for (double& v : out) v = std::sqrt(v);
    return out;
}

Index argmax(const std::vector<double>& v) {
    return static_cast<Index>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Lateral slice n of P as an N x 1 x N3 tensor, i.e. P * e_n.
Tensor3 lateral_slice(const Tensor3& p, Index n) {
    Tensor3 m(Dims{p.n1(), 1, p.n3()});
    for (Index i = 0; i < p.n1(); ++i)
        for (Index k = 0; k < p.n3(); ++k) m(i, 0, k) = p(i, n, k);
    return m;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void require_nonzero_rank(const TangentBasis& t, const char* op) {
    if (t.rank() == 0) throw ZeroTensor(op, "tensor has tubal rank 0");
}

} // namespace

double beta_incoherence(const Tensor3& projector) {
    if (projector.n1() != projector.n2())
        throw ShapeMismatch("beta_incoherence", "projector must be N x N x N3");
    const Tensor3 sq = tprod(projector, projector);
    const double defect = norm(sq - projector);
    if (defect > kProjectorTol * std::max(1.0, norm(projector)))
        throw NotAProjector("beta_incoherence",
                            "||P*P - P||_F = " + fmt(defect) + " is not idempotent");
    if (projector.n2() == 0) return 0.0;
    const auto norms = lateral_norms(projector);
    return *std::max_element(norms.begin(), norms.end());
}

double inc(const TangentBasis& t) {
    require_nonzero_rank(t, "inc");
    return std::max(beta_incoherence(t.PU()), beta_incoherence(t.PV()));
}

double inc(const Tensor3& l, double rank_tol) {
    if (l.is_zero()) throw ZeroTensor("inc", "L must be nonzero");
    return inc(tangent_of(l, rank_tol));
}

DegreeBounds deg_bounds(const SupportMask& m) {
    DegreeBounds b;
    bool first = true;
    auto take = [&](Index c) {
        if (first) {
            b.deg_min = b.deg_max = c;
            first = false;
        } else {
            b.deg_min = std::min(b.deg_min, c);
            b.deg_max = std::max(b.deg_max, c);
        }
    };
    for (Index c : m.horizontal_counts()) take(c);
    for (Index c : m.lateral_counts()) take(c);
    return b;
}

double mu_exact(const SupportMask& m) {
    if (m.count() == 0) return 0.0;
    return spectral_norm(m.indicator());
}

XiBounds xi_bounds_from_inc(double inc_value, Index n3) {
    if (n3 <= 0) throw DomainError("xi_bounds", "n3 must be positive");
    return {inc_value / std::sqrt(static_cast<double>(n3)), 2.0 * inc_value};
}

XiBounds xi_bounds(const Tensor3& l) {
    return xi_bounds_from_inc(inc(l), l.n3());
}

double xi_lower_estimate(const TangentBasis& t, int samples, int iters, std::uint64_t seed) {
    if (samples < 1) throw DomainError("xi_lower_estimate", "samples must be >= 1");
    if (t.rank() == 0) return 0.0;
    const Dims d = t.ambient();

    double best = 0.0;
    Tensor3 best_n;
    auto consider = [&](const Tensor3& cand) {
        Tensor3 n = project_T(t, cand);
        const double s = spectral_norm(n);
        if (!(s > 0.0)) return false;
        n *= 1.0 / s;
        const double v = norm(n, NormKind::linf);
        if (v > best) {
            best = v;
            best_n = std::move(n);
            return true;
        }
        return false;
    };

    // Coherence-aligned seeds: (PU * e_n) * e_0^T and e_0 * (PV * e_m)^T at the
    // most coherent n, m. Each reaches at least beta / sqrt(N3).
    {
        const Tensor3 mu_col = lateral_slice(t.PU(), argmax(lateral_norms(t.PU())));
        Tensor3 seed_u(d);
        for (Index i = 0; i < d.n1; ++i)
            for (Index k = 0; k < d.n3; ++k) seed_u(i, 0, k) = mu_col(i, 0, k);
        consider(seed_u);

        const Tensor3 mv_col = lateral_slice(t.PV(), argmax(lateral_norms(t.PV())));
        const Tensor3 e0 = basis({BasisKind::column, 0, d.n1, d.n3});
        consider(tprod(e0, ttranspose(mv_col)));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < samples; ++s) {
        Tensor3 g(d);
        for (double& v : g.data()) v = gauss(rng);
        consider(g);
    }

    // Ascent: push the current maximizer towards its largest coordinate.
    for (int it = 0; it < iters && best > 0.0; ++it) {
        Index bi = 0, bj = 0, bk = 0;
        double bv = -1.0;
        for (Index i = 0; i < d.n1; ++i)
            for (Index j = 0; j < d.n2; ++j)
                for (Index k = 0; k < d.n3; ++k)
                    if (std::abs(best_n(i, j, k)) > bv) {
                        bv = std::abs(best_n(i, j, k));
                        bi = i, bj = j, bk = k;
                    }
        Tensor3 dir(d);
        dir(bi, bj, bk) = best_n(bi, bj, bk) >= 0 ? 1.0 : -1.0;
        dir = project_T(t, dir);
        const double dn = norm(dir);
        if (!(dn > 0.0)) break;
        const Tensor3 base = best_n;
        const double scale = norm(base) / dn;
        bool improved = consider(dir);
        for (double alpha : {0.25, 1.0, 4.0}) improved |= consider(base + (alpha * scale) * dir);
        if (!improved) break;
    }
    return best;
}

double xi_lower_estimate(const Tensor3& l, int samples, int iters, std::uint64_t seed) {
    return xi_lower_estimate(tangent_of(l), samples, iters, seed);
}

std::optional<GammaRange> gamma_range_thm3(double xi, double mu) {
    if (!(xi > 0.0) || !(mu > 0.0))
        throw DomainError("gamma_range_thm3", "xi and mu must be positive");
    const double prod = xi * mu;
    if (!(prod < 1.0 / 6.0)) return std::nullopt;
    return GammaRange{xi / (1.0 - 4.0 * prod), (1.0 - 3.0 * prod) / mu};
}

double gamma_interp(double xi, double mu, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gamma_interp", "p must lie in [0, 1]");
    if (!(xi > 0.0) || !(mu > 0.0))
        throw DomainError("gamma_interp", "xi and mu must be positive");
    return std::pow(3.0 * xi, p) / std::pow(2.0 * mu, 1.0 - p);
}

std::optional<GammaRange> gamma_range_cor3(double inc_value, Index deg_max) {
    if (!(inc_value > 0.0) || deg_max < 1)
        throw DomainError("gamma_range_cor3", "inc must be positive and deg_max >= 1");
    const double deg = static_cast<double>(deg_max);
    const double prod = inc_value * deg;
    if (!(prod < 1.0 / 12.0)) return std::nullopt;
    return GammaRange{2.0 * inc_value / (1.0 - 8.0 * prod), (1.0 - prod) / deg};
}

double gamma_interp_cor3(double inc_value, Index deg_max, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("gamma_interp_cor3", "p must lie in [0, 1]");
    if (!(inc_value > 0.0) || deg_max < 1)
        throw DomainError("gamma_interp_cor3", "inc must be positive and deg_max >= 1");
    return std::pow(6.0 * inc_value, p) / std::pow(2.0 * static_cast<double>(deg_max), 1.0 - p);
}

UncertaintyAudit uncertainty_audit(const Tensor3& a) {
    if (a.is_zero()) throw ZeroTensor("uncertainty_audit", "A must be nonzero");
    UncertaintyAudit out;
    out.value = 2.0 * inc(a) * mu_exact(support_of(a));
    out.pass = out.value >= 1.0 - 1e-9;
    return out;
}

DualCertificate dual_certificate(const TangentBasis& t, const SupportMask& support,
                                 const Tensor3& sign, double gamma, int max_iters, double tol) {
    if (!(gamma > 0.0)) throw DomainError("dual_certificate", "gamma must be positive");
    if (max_iters < 1) throw DomainError("dual_certificate", "max_iters must be >= 1");
    if (support.dims() != t.ambient() || sign.dims() != t.ambient())
        throw ShapeMismatch("dual_certificate", "support, sign and tangent shapes differ");

    const Tensor3 polar = t.polar();
    const Tensor3 gsign = gamma * project_omega(support, sign);
    const double scale = std::max(1.0, norm(polar) + norm(gsign));

    DualCertificate cert;
    Tensor3 h_omega(t.ambient());
    Tensor3 h_t = -project_T(t, gsign);
    int growing = 0;
    for (int it = 1; it <= max_iters; ++it) {
        Tensor3 next_omega = -project_omega(support, polar + h_t);
        Tensor3 next_t = -project_T(t, gsign + next_omega);
        const double change = norm(next_omega - h_omega) + norm(next_t - h_t);
        if (!std::isfinite(change))
            throw NonConvergence("dual_certificate", "fixed-point iterate is not finite");
        h_omega = std::move(next_omega);
        h_t = std::move(next_t);
        cert.changes.push_back(change);
        cert.iterations = it;
        if (change <= tol * scale) {
            cert.converged = true;
            break;
        }
        if (cert.changes.size() >= 2 && change >= cert.changes[cert.changes.size() - 2]) {
            if (++growing >= 3)
                throw NonConvergence("dual_certificate",
                                     "fixed-point iteration stopped contracting at iteration " +
                                         std::to_string(it));
        } else {
            growing = 0;
        }
    }

    cert.Q = (polar + h_t) + (gsign + h_omega);
    cert.t_residual = norm(project_T(t, cert.Q) - polar);
    cert.omega_residual = norm(project_omega(support, cert.Q) - gsign);
    cert.spectral_slack = 1.0 - spectral_norm(project_T_perp(t, cert.Q));
    cert.linf_slack = gamma - norm(project_omega_comp(support, cert.Q), NormKind::linf);
    cert.H_T = std::move(h_t);
    cert.H_Omega = std::move(h_omega);
    return cert;
}

DualCertificate dual_certificate(const Tensor3& l0, const Tensor3& e0, double gamma,
                                 int max_iters, double tol) {
    if (l0.dims() != e0.dims())
        throw ShapeMismatch("dual_certificate", to_string(l0.dims()) + " vs " + to_string(e0.dims()));
    return dual_certificate(tangent_of(l0), support_of(e0), sign_of(e0), gamma, max_iters, tol);
}

CertificateReport certify(const Tensor3& l0, const Tensor3& e0, const CertifyOptions& opts) {
    if (l0.dims() != e0.dims())
        throw ShapeMismatch("certify", to_string(l0.dims()) + " vs " + to_string(e0.dims()));
    CertificateReport r;
    r.dims = l0.dims();

    const TangentBasis t = tangent_of(l0, opts.rank_tol);
    const SupportMask support = support_of(e0, opts.support_tol);
    const Tensor3 sign = project_omega(support, sign_of(e0));
    r.rank = t.rank();
    r.support_size = support.count();

    if (r.rank > 0) {
        r.beta_U = beta_incoherence(t.PU());
        r.beta_V = beta_incoherence(t.PV());
        r.inc = std::max(r.beta_U, r.beta_V);
        const XiBounds xb = xi_bounds_from_inc(r.inc, r.dims.n3);
        r.xi_lower = xb.lower;
        r.xi_upper = xb.upper;
        r.xi_estimate = xi_lower_estimate(t, opts.xi_samples, opts.xi_iters, opts.seed);
    }
    r.mu = mu_exact(support);
    const DegreeBounds db = deg_bounds(support);
    r.deg_min = db.deg_min;
    r.deg_max = db.deg_max;
    r.product_condition = r.xi_upper * r.mu;
    r.cor3_condition = r.inc * static_cast<double>(r.deg_max);

    if (r.xi_upper > 0.0 && r.mu > 0.0) r.gamma_range = gamma_range_thm3(r.xi_upper, r.mu);
    if (r.inc > 0.0 && r.deg_max >= 1) r.gamma_range_cor3 = gamma_range_cor3(r.inc, r.deg_max);

    if (opts.gamma) {
        r.gamma = *opts.gamma;
    } else if (r.gamma_range) {
        r.gamma = gamma_interp(r.xi_upper, r.mu, opts.p);
    } else if (r.gamma_range_cor3) {
        r.gamma = gamma_interp_cor3(r.inc, r.deg_max, opts.p);
    }

    try {
        r.gauge = transversality_gauge(t, support, opts.gauge_iters, opts.gauge_tol);
    } catch (const NonConvergence& e) {
        r.gauge_error = e.what();
    }

    if (opts.run_dual && r.gamma) {
        try {
            r.dual = dual_certificate(t, support, sign, *r.gamma, opts.dual_max_iters, opts.dual_tol);
        } catch (const NonConvergence& e) {
            r.dual_error = e.what();
        }
    }
    return r;
}

void write_report(std::ostream& out, const CertificateReport& r) {
    auto range = [](const std::optional<GammaRange>& g) {
        return g ? fmt(g->lo) + " " + fmt(g->hi) : std::string("none");
    };
    out << "dims: " << to_string(r.dims) << '\n'
        << "tubal_rank: " << r.rank << '\n'
        << "support_size: " << r.support_size << '\n'
        << "inc: " << fmt(r.inc) << '\n'
        << "beta_U: " << fmt(r.beta_U) << '\n'
        << "beta_V: " << fmt(r.beta_V) << '\n'
        << "xi_lower: " << fmt(r.xi_lower) << '\n'
        << "xi_estimate: " << fmt(r.xi_estimate) << '\n'
        << "xi_upper: " << fmt(r.xi_upper) << '\n'
        << "mu: " << fmt(r.mu) << '\n'
        << "deg_min: " << r.deg_min << '\n'
        << "deg_max: " << r.deg_max << '\n'
        << "product_condition: " << fmt(r.product_condition) << '\n'
        << "cor3_condition: " << fmt(r.cor3_condition) << '\n'
        << "thm3_ok: " << (r.thm3_ok() ? "true" : "false") << '\n'
        << "cor3_ok: " << (r.cor3_ok() ? "true" : "false") << '\n'
        << "gamma_range: " << range(r.gamma_range) << '\n'
        << "gamma_range_cor3: " << range(r.gamma_range_cor3) << '\n'
        << "gamma: " << (r.gamma ? fmt(*r.gamma) : "none") << '\n'
        << "gauge: " << (r.gauge ? fmt(*r.gauge) : "none") << '\n';
    if (!r.gauge_error.empty()) out << "gauge_error: " << r.gauge_error << '\n';
    if (r.dual) {
        const DualCertificate& d = *r.dual;
        out << "dual_converged: " << (d.converged ? "true" : "false") << '\n'
            << "dual_iterations: " << d.iterations << '\n'
            << "dual_spectral_slack: " << fmt(d.spectral_slack) << '\n'
            << "dual_linf_slack: " << fmt(d.linf_slack) << '\n'
            << "dual_t_residual: " << fmt(d.t_residual) << '\n'
            << "dual_omega_residual: " << fmt(d.omega_residual) << '\n';
    } else {
        out << "dual_converged: none\n";
    }
    if (!r.dual_error.empty()) out << "dual_error: " << r.dual_error << '\n';
    out << "dual_ok: " << (r.dual_ok() ? "true" : "false") << '\n';
}

} // namespace rtpca
