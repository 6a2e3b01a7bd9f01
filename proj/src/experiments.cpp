#include "rtpca/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "rtpca/tangent.hpp"
#include "rtpca/tsvd.hpp"

namespace rtpca {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Tensor3 gaussian_tensor(const Dims& d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Tensor3 t(d);
    for (double& v : t.data()) v = gauss(rng);
    return t;
}

// n x r with orthonormal columns and entries of modulus 1/sqrt(n): Hadamard
// columns (or the all-ones column when r = 1) under a random diagonal of
// signs (real slices) or phases.
Eigen::MatrixXcd flat_orthonormal(Index n, Index r, bool real_slice, std::mt19937_64& rng) {
    if (r > 1 && !std::has_single_bit(static_cast<std::uint64_t>(n)))
        throw DomainError("gen_low_tubal_rank",
                          "flat factors with R > 1 need power-of-two sizes, got " + std::to_string(n));
    std::vector<Index> cols(static_cast<std::size_t>(n));
    for (Index c = 0; c < n; ++c) cols[static_cast<std::size_t>(c)] = c;
    if (r > 1) std::shuffle(cols.begin(), cols.end(), rng);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXcd m(n, r);
    for (Index i = 0; i < n; ++i) {
        const cplx d = real_slice ? cplx(unif(rng) < 0.5 ? -1.0 : 1.0, 0.0)
                                  : std::polar(1.0, 2.0 * std::numbers::pi * unif(rng));
        for (Index c = 0; c < r; ++c) {
            const auto h = static_cast<std::uint64_t>(i) & static_cast<std::uint64_t>(cols[static_cast<std::size_t>(c)]);
            const double sign = std::popcount(h) % 2 == 0 ? 1.0 : -1.0;
            m(i, c) = d * (sign * scale);
        }
    }
    return m;
}

Tensor3 flat_low_rank(const Dims& d, Index rank, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double level = std::sqrt(static_cast<double>(d.n1) * static_cast<double>(d.n2));
    FourierSlices f{d, std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(d.n3))};
    for (Index k = 0; k < f.independent(); ++k) {
        const bool real_slice = k == 0 || 2 * k == d.n3;
        const Eigen::MatrixXcd u = flat_orthonormal(d.n1, rank, real_slice, rng);
        const Eigen::MatrixXcd v = flat_orthonormal(d.n2, rank, real_slice, rng);
        Eigen::VectorXd s(rank);
        for (Index i = 0; i < rank; ++i) s(i) = level * (1.0 + 0.5 * unif(rng));
        f.slices[static_cast<std::size_t>(k)] = u * s.cast<cplx>().asDiagonal() * v.adjoint();
    }
    for (Index k = f.independent(); k < d.n3; ++k)
        f.slices[static_cast<std::size_t>(k)] = Eigen::MatrixXcd::Zero(d.n1, d.n2);
    f.mirror();
    return idft_mode3(f);
}

double magnitude(MagnitudeLaw law, std::mt19937_64& rng) {
    if (law == MagnitudeLaw::rademacher) {
        std::uniform_int_distribution<int> coin(0, 1);
        return coin(rng) ? 1.0 : -1.0;
    }
    std::normal_distribution<double> gauss;
    double v = 0.0;
    while (v == 0.0) v = gauss(rng);
    return v;
}

double distance(const Tensor3& est, const Tensor3& ref) {
    const double scale = norm(ref);
    return norm(est - ref) / (scale > 0.0 ? scale : 1.0);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// All cells of one (rank, pattern) instance.
std::vector<SweepCell> run_instance(const SweepGrid& grid, const SolverConfig& tmpl, Index rank,
                                    const SparsePattern& pattern, std::uint64_t seed) {
    const std::size_t n_cells = grid.ps.size() + grid.gammas.size();
    std::vector<SweepCell> cells(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        SweepCell& cell = cells[c];
        cell.r = rank;
        cell.pattern = to_string(pattern);
        cell.p = c < grid.ps.size() ? grid.ps[c] : kNaN;
        cell.gamma = c < grid.ps.size() ? kNaN : grid.gammas[c - grid.ps.size()];
        cell.inc = cell.mu = cell.err_L = cell.err_E = kNaN;
    }
    auto fail_all = [&](const std::string& what) {
        for (auto& cell : cells) cell.error = what;
        return cells;
    };

    Instance inst;
    CertificateReport rep;
    try {
        inst = make_instance({grid.dims, rank, pattern, grid.magnitudes, grid.factors, seed});
        if (inst.L0.is_zero()) {
            // Nothing to certify; the solver still runs on X = E0.
            const SupportMask m = support_of(inst.E0);
            rep.inc = kNaN;
            rep.mu = mu_exact(m);
            rep.deg_max = deg_bounds(m).deg_max;
        } else {
            CertifyOptions opts;
            opts.run_dual = false;
            rep = certify(inst.L0, inst.E0, opts);
        }
    } catch (const Error& e) {
        return fail_all(e.what());
    }

    const SupportMask support = support_of(inst.E0);
    const double sparsity =
        grid.dims.size() > 0 ? static_cast<double>(support.count()) / static_cast<double>(grid.dims.size()) : 0.0;

    for (auto& cell : cells) {
        cell.sparsity = sparsity;
        cell.inc = rep.inc;
        cell.mu = rep.mu;
        cell.deg_max = rep.deg_max;
        try {
            if (!std::isnan(cell.p)) {
                if (rep.gamma_range)
                    cell.gamma = gamma_interp(rep.xi_upper, rep.mu, cell.p);
                else if (rep.gamma_range_cor3)
                    cell.gamma = gamma_interp_cor3(rep.inc, rep.deg_max, cell.p);
                else if (rep.xi_upper > 0.0 && rep.mu > 0.0)
                    cell.gamma = gamma_interp(rep.xi_upper, rep.mu, cell.p);
                else
                    cell.gamma = default_gamma(tmpl.penalty, grid.dims);
            }
            cell.cert_ok = (rep.gamma_range && rep.gamma_range->contains(cell.gamma)) ||
                           (rep.gamma_range_cor3 && rep.gamma_range_cor3->contains(cell.gamma));
            if (grid.run_dual && rep.gauge) {
                try {
                    const DualCertificate d = dual_certificate(tangent_of(inst.L0), support,
                                                               sign_of(inst.E0), cell.gamma);
                    cell.dual_ok = d.certified() && *rep.gauge < 1.0;
                } catch (const NonConvergence&) {
                    cell.dual_ok = false;
                }
            }

            SolverConfig cfg = tmpl;
            cfg.gamma = cell.gamma;
            const auto t0 = std::chrono::steady_clock::now();
            SolverResult res;
            try {
                res = rtpca(inst.X, cfg);
            } catch (const MaxItersExceeded& e) {
                res = e.partial();
                cell.error = e.what();
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            cell.err_L = distance(res.L, inst.L0);
            cell.err_E = distance(res.E, inst.E0);
            cell.success = cell.error.empty() && cell.err_L <= kSuccessThreshold;
        } catch (const Error& e) {
            cell.error = e.what();
            cell.success = false;
        }
    }
    return cells;
}

} // namespace

std::string to_string(const SparsePattern& p) {
    return (p.kind == SparsePattern::Kind::random_m_entries ? "m=" : "deg=") + std::to_string(p.count);
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Tensor3 gen_low_tubal_rank(const Dims& dims, Index rank, std::uint64_t seed, FactorLaw law) {
    if (rank < 0) throw DomainError("gen_low_tubal_rank", "rank must be >= 0");
    if (rank > std::min(dims.n1, dims.n2))
        throw RankTooLarge("gen_low_tubal_rank", "R = " + std::to_string(rank) +
                                                     " exceeds min(N1, N2) for " + to_string(dims));
    if (rank == 0 || dims.size() == 0) return Tensor3(dims);

    std::mt19937_64 rng(seed);
    Tensor3 l;
    if (law == FactorLaw::gaussian) {
        const Tensor3 p = gaussian_tensor({dims.n1, rank, dims.n3}, rng);
        const Tensor3 q = gaussian_tensor({dims.n2, rank, dims.n3}, rng);
        l = tprod(p, ttranspose(q));
    } else {
        l = flat_low_rank(dims, rank, rng);
    }
    const Index got = tubal_rank(l, kDefaultRankTol);
    if (got != rank)
        throw InvalidValue("gen_low_tubal_rank", "generated tubal rank " + std::to_string(got) +
                                                     ", expected " + std::to_string(rank));
    return l;
}

Tensor3 gen_sparse(const Dims& dims, const SparsePattern& pattern, std::uint64_t seed,
                   MagnitudeLaw law) {
    const Index total = dims.size();
    std::mt19937_64 rng(seed);
    Tensor3 e(dims);
    auto data = e.data();

    if (pattern.kind == SparsePattern::Kind::random_m_entries) {
        const Index m = pattern.count;
        if (m < 0 || m > total)
            throw InfeasiblePattern("gen_sparse", "cannot place " + std::to_string(m) +
                                                      " entries in " + to_string(dims));
        std::vector<Index> idx(static_cast<std::size_t>(total));
        for (Index i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (Index i = 0; i < m; ++i) {
            std::uniform_int_distribution<Index> pick(i, total - 1);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
            data[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = magnitude(law, rng);
        }
        if (support_of(e).count() != m)
            throw InfeasiblePattern("gen_sparse", "generated support has the wrong size");
        return e;
    }

    const Index deg = pattern.count;
    const Index small = std::min(dims.n1, dims.n2);
    const Index large = std::max(dims.n1, dims.n2);
    if (deg < 0 || deg > small * dims.n3)
        throw InfeasiblePattern("gen_sparse", "per-slice cap " + std::to_string(deg) +
                                                  " does not fit " + to_string(dims));
    // Each round pairs every slice on the smaller side with a distinct slice on
    // the larger side, so no horizontal or lateral slice gains more than one
    // entry per round.
    std::vector<Index> perm(static_cast<std::size_t>(large));
    std::vector<Index> free_k;
    for (Index round = 0; round < deg; ++round) {
        for (Index a = 0; a < large; ++a) perm[static_cast<std::size_t>(a)] = a;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (Index a = 0; a < small; ++a) {
            const Index b = perm[static_cast<std::size_t>(a)];
            const Index i = dims.n1 <= dims.n2 ? a : b;
            const Index j = dims.n1 <= dims.n2 ? b : a;
            free_k.clear();
            for (Index k = 0; k < dims.n3; ++k)
                if (e(i, j, k) == 0.0) free_k.push_back(k);
            if (free_k.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, free_k.size() - 1);
            e(i, j, free_k[pick(rng)]) = magnitude(law, rng);
        }
    }
    if (total > 0 && deg_bounds(support_of(e)).deg_max > deg)
        throw InfeasiblePattern("gen_sparse", "generated support exceeds the per-slice cap");
    return e;
}

Instance make_instance(const InstanceSpec& spec) {
    Instance out;
    out.L0 = gen_low_tubal_rank(spec.dims, spec.rank, mix_seed(spec.seed ^ 0x4c30ULL), spec.factors);
    out.E0 = gen_sparse(spec.dims, spec.pattern, mix_seed(spec.seed ^ 0x4530ULL), spec.magnitudes);
    out.X = out.L0 + out.E0;
    return out;
}

CertifiedInstance certified_recipe(std::uint64_t seed, FactorLaw law, int max_attempts) {
    InstanceSpec spec{{256, 256, 3}, 1, SparsePattern::random_m(1), MagnitudeLaw::rademacher, law, 0};
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < max_attempts; ++a) {
        spec.seed = mix_seed(seed + static_cast<std::uint64_t>(a));
        Instance inst = make_instance(spec);
        const double value = inc(inst.L0);
        if (value < 1.0 / 12.0) return {std::move(inst), spec, value, a + 1};
        best = std::min(best, value);
    }
    throw InfeasiblePattern("certified_recipe", "no instance with inc < 1/12 in " +
                                                    std::to_string(max_attempts) +
                                                    " attempts (smallest inc " + fmt(best) + ")");
}

unsigned worker_count() {
    if (const char* env = std::getenv("RTPCA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepGrid& grid, const SolverConfig& solver_template, unsigned threads) {
    if (grid.ranks.empty() || grid.patterns.empty() || (grid.ps.empty() && grid.gammas.empty()))
        throw DomainError("run_sweep", "grid is empty");
    for (double p : grid.ps)
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("run_sweep", "p must lie in [0, 1]");
    for (double g : grid.gammas)
        if (!(g > 0.0)) throw DomainError("run_sweep", "gamma must be positive");

    const std::size_t n_tasks = grid.ranks.size() * grid.patterns.size();
    std::vector<std::vector<SweepCell>> per_task(n_tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) {
            const Index rank = grid.ranks[t / grid.patterns.size()];
            const SparsePattern& pattern = grid.patterns[t % grid.patterns.size()];
            per_task[t] = run_instance(grid, solver_template, rank, pattern,
                                       mix_seed(grid.seed + static_cast<std::uint64_t>(t)));
        }
    };

    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(threads ? threads : worker_count(), n_tasks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepResult out;
    for (auto& cells : per_task)
        for (auto& c : cells) out.cells.push_back(std::move(c));
    return out;
}

void write_csv(std::ostream& out, const SweepResult& result, bool timing) {
    out << "r,sparsity,gamma,p,inc,mu,deg_max,cert_ok,dual_ok,err_L,err_E,success,seconds\n";
    for (const SweepCell& c : result.cells) {
        out << c.r << ',' << fmt(c.sparsity) << ',' << fmt(c.gamma) << ',' << fmt(c.p) << ','
            << fmt(c.inc) << ',' << fmt(c.mu) << ',' << c.deg_max << ',' << (c.cert_ok ? 1 : 0)
            << ',' << (c.dual_ok ? 1 : 0) << ',' << fmt(c.err_L) << ',' << fmt(c.err_E) << ','
            << (c.success ? 1 : 0) << ',' << (timing ? fmt(c.seconds) : std::string("NA")) << '\n';
    }
}

} // namespace rtpca
