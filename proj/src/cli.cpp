#include "rtpca/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "rtpca/certify.hpp"
#include "rtpca/experiments.hpp"
#include "rtpca/solver.hpp"
#include "rtpca/tensor_io.hpp"
#include "rtpca/tsvd.hpp"

namespace rtpca::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// "dir/A.t3" -> "dir/A"; the factor and solution files are named from it.
fs::path stem_path(const fs::path& in) {
    fs::path p = in;
    if (p.extension() == ".t3") p.replace_extension();
    return p;
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
    fs::path p = stem;
    p += suffix;
    return p;
}

// Output files may not exist yet; their directory must.
void require_writable_dir(const fs::path& out) {
    const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    if (!fs::is_directory(dir))
        throw CLI::ValidationError(out.string(), "directory " + dir.string() + " does not exist");
}

struct TsvdArgs {
    std::string in;
    double tol = kDefaultRankTol;
};

int run_tsvd(const TsvdArgs& a, std::ostream& out) {
    const Tensor3 x = read_tensor_file(a.in);
    const TSvdFactors f = tsvd_skinny(x, a.tol);
    const fs::path stem = stem_path(a.in);
    write_tensor_file(with_suffix(stem, ".U.t3"), f.U);
    write_tensor_file(with_suffix(stem, ".S.t3"), f.S);
    write_tensor_file(with_suffix(stem, ".V.t3"), f.V);
    out << "rank=" << f.rank << " nuclear=" << num(nuclear_norm(x))
        << " spectral=" << num(spectral_norm(x)) << '\n';
    return kExitOk;
}

struct SolveArgs {
    std::string in;
    std::string out_l;
    std::string out_e;
    std::string gamma = "auto";
    std::string penalty = "l1";
    SolverConfig cfg;
};

int run_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    SolverConfig cfg = a.cfg;
    cfg.penalty = parse_penalty(a.penalty);
    if (a.gamma != "auto") {
        try {
            std::size_t used = 0;
            cfg.gamma = std::stod(a.gamma, &used);
            if (used != a.gamma.size()) throw std::invalid_argument(a.gamma);
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--gamma", "expected a number or 'auto', got " + a.gamma);
        }
    }
    const fs::path stem = stem_path(a.in);
    const fs::path out_l = a.out_l.empty() ? with_suffix(stem, ".L.t3") : fs::path(a.out_l);
    const fs::path out_e = a.out_e.empty() ? with_suffix(stem, ".E.t3") : fs::path(a.out_e);
    require_writable_dir(out_l);
    require_writable_dir(out_e);

    const Tensor3 x = read_tensor_file(a.in);
    SolverResult res;
    int code = kExitOk;
    try {
        res = rtpca(x, cfg);
    } catch (const MaxItersExceeded& e) {
        res = e.partial();
        err << "error: " << e.what() << '\n';
        code = kExitComputation;
    }
    write_tensor_file(out_l, res.L);
    write_tensor_file(out_e, res.E);
    const double obj = res.objective_trace.empty() ? objective(res.L, res.E, res.gamma, cfg.penalty)
                                                   : res.objective_trace.back();
    out << "iters=" << res.iterations << " residual=" << num(res.primal_residual)
        << " objective=" << num(obj) << '\n';
    return code;
}

struct CertifyArgs {
    std::string l;
    std::string e;
    std::string condition = "cor3";
    std::optional<double> gamma;
    CertifyOptions opts;
    bool no_dual = false;
};

int run_certify(const CertifyArgs& a, std::ostream& out) {
    const Tensor3 l0 = read_tensor_file(a.l);
    const Tensor3 e0 = read_tensor_file(a.e);
    CertifyOptions opts = a.opts;
    opts.gamma = a.gamma;
    opts.run_dual = !a.no_dual || a.condition == "dual";
    const CertificateReport r = certify(l0, e0, opts);
    write_report(out, r);
    bool ok = false;
    if (a.condition == "thm3") ok = r.thm3_ok();
    else if (a.condition == "cor3") ok = r.cor3_ok();
    else ok = r.dual_ok();
    out << "condition: " << a.condition << ' ' << (ok ? "satisfied" : "not_satisfied") << '\n';
    return ok ? kExitOk : kExitConditionFailed;
}

FactorLaw parse_factors(const std::string& s) {
    return s == "flat" ? FactorLaw::flat : FactorLaw::gaussian;
}

MagnitudeLaw parse_magnitudes(const std::string& s) {
    return s == "gaussian" ? MagnitudeLaw::gaussian : MagnitudeLaw::rademacher;
}

struct SynthArgs {
    std::string prefix;
    Index n1 = 32, n2 = 32, n3 = 3;
    Index rank = 1;
    std::optional<Index> m;
    std::optional<Index> deg;
    std::string factors; // gaussian, or flat for the certified recipe
    std::string magnitudes = "rademacher";
    std::string recipe;
    std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
    const fs::path prefix = a.prefix;
    require_writable_dir(prefix);
    Instance inst;
    if (a.recipe == "certified") {
        inst = certified_recipe(a.seed, parse_factors(a.factors.empty() ? "flat" : a.factors)).instance;
    } else {
        InstanceSpec spec;
        spec.dims = {a.n1, a.n2, a.n3};
        spec.rank = a.rank;
        spec.pattern = a.deg ? SparsePattern::capped(*a.deg) : SparsePattern::random_m(a.m.value_or(1));
        spec.factors = parse_factors(a.factors);
        spec.magnitudes = parse_magnitudes(a.magnitudes);
        spec.seed = a.seed;
        inst = make_instance(spec);
    }
    write_tensor_file(with_suffix(prefix, ".L0.t3"), inst.L0);
    write_tensor_file(with_suffix(prefix, ".E0.t3"), inst.E0);
    write_tensor_file(with_suffix(prefix, ".X.t3"), inst.X);
    const SupportMask support = support_of(inst.E0);
    out << "dims=" << to_string(inst.X.dims()) << " rank=" << tubal_rank(inst.L0)
        << " nnz=" << support.count() << " deg_max=" << deg_bounds(support).deg_max;
    if (!inst.L0.is_zero()) out << " inc=" << num(inc(inst.L0));
    out << '\n';
    return kExitOk;
}

struct SweepArgs {
    std::string out;
    Index n1 = 32, n2 = 32, n3 = 3;
    std::vector<Index> ranks{1};
    std::vector<Index> ms;
    std::vector<Index> degs;
    std::vector<double> ps{0.1, 0.5, 0.9};
    std::vector<double> gammas;
    std::string factors = "gaussian";
    std::string penalty = "l1";
    SolverConfig cfg;
    std::uint64_t seed = 1;
    bool no_dual = false;
    bool timing = false;
};

int run_sweep_cmd(const SweepArgs& a, std::ostream& out) {
    require_writable_dir(a.out);
    SweepGrid grid;
    grid.dims = {a.n1, a.n2, a.n3};
    grid.ranks = a.ranks;
    grid.patterns.clear();
    for (Index m : a.ms) grid.patterns.push_back(SparsePattern::random_m(m));
    for (Index d : a.degs) grid.patterns.push_back(SparsePattern::capped(d));
    if (grid.patterns.empty()) grid.patterns.push_back(SparsePattern::random_m(1));
    grid.ps = a.ps;
    grid.gammas = a.gammas;
    grid.factors = parse_factors(a.factors);
    grid.seed = a.seed;
    grid.run_dual = !a.no_dual;
    SolverConfig cfg = a.cfg;
    cfg.penalty = parse_penalty(a.penalty);

    const SweepResult res = run_sweep(grid, cfg);
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error("sweep", "cannot open " + a.out + " for writing");
    write_csv(f, res, a.timing);
    if (!f) throw Error("sweep", "failed writing " + a.out);
    const auto ok = std::count_if(res.cells.begin(), res.cells.end(),
                                  [](const SweepCell& c) { return c.success; });
    out << "cells=" << res.cells.size() << " success=" << ok << '\n';
    return kExitOk;
}

void add_solver_flags(CLI::App* sub, SolverConfig& cfg) {
    sub->add_option("--tol", cfg.tol, "Relative primal residual target")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--max-iters", cfg.max_iters, "Iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--rho0", cfg.rho0, "Initial penalty")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--rho-scale", cfg.rho_scale, "Penalty growth factor")->capture_default_str();
    sub->add_option("--rho-max", cfg.rho_max, "Penalty cap")->capture_default_str();
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust tensor PCA under the t-product: t-SVD, solver, recovery certificates"};
    app.name("rtpca");
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Report the subcommand and timing on stderr");

    TsvdArgs tsvd;
    auto* c_tsvd = app.add_subcommand("tsvd", "Skinny t-SVD; writes <stem>.U/.S/.V.t3 beside the input");
    c_tsvd->add_option("--in", tsvd.in, "Input tensor file")->required()->check(CLI::ExistingFile);
    c_tsvd->add_option("--tol", tsvd.tol, "Relative rank tolerance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "Split X into low-tubal-rank L and sparse E");
    c_solve->add_option("--in", solve.in, "Input tensor X")->required()->check(CLI::ExistingFile);
    c_solve->add_option("--out-L", solve.out_l, "Output for L (default <stem>.L.t3)");
    c_solve->add_option("--out-E", solve.out_e, "Output for E (default <stem>.E.t3)");
    c_solve->add_option("--gamma", solve.gamma, "Sparsity weight or 'auto'")->capture_default_str();
    c_solve->add_option("--penalty", solve.penalty, "Sparse penalty")
        ->check(CLI::IsMember({"l1", "tube", "slice"}))
        ->capture_default_str();
    add_solver_flags(c_solve, solve.cfg);

    CertifyArgs cert;
    auto* c_cert = app.add_subcommand("certify", "Recovery certificate report for (L0, E0)");
    c_cert->add_option("--L", cert.l, "Low-rank component")->required()->check(CLI::ExistingFile);
    c_cert->add_option("--E", cert.e, "Sparse component")->required()->check(CLI::ExistingFile);
    c_cert->add_option("--condition", cert.condition, "Condition deciding the exit status")
        ->check(CLI::IsMember({"thm3", "cor3", "dual"}))
        ->capture_default_str();
    c_cert->add_option("--gamma", cert.gamma, "Weight for the dual certificate")->check(CLI::PositiveNumber);
    c_cert->add_option("--p", cert.opts.p, "Interpolation point in [0, 1] for the default gamma")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_cert->add_option("--rank-tol", cert.opts.rank_tol, "Relative rank tolerance")->capture_default_str();
    c_cert->add_option("--support-tol", cert.opts.support_tol, "Support threshold on |E|")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_cert->add_option("--seed", cert.opts.seed, "Seed for the xi estimate")->capture_default_str();
    c_cert->add_flag("--no-dual", cert.no_dual, "Skip the dual certificate");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate L0, E0 and X = L0 + E0");
    c_synth->add_option("--out-prefix", synth.prefix, "Writes <prefix>.L0/.E0/.X.t3")->required();
    c_synth->add_option("--n1", synth.n1)->check(CLI::PositiveNumber)->capture_default_str();
    c_synth->add_option("--n2", synth.n2)->check(CLI::PositiveNumber)->capture_default_str();
    c_synth->add_option("--n3", synth.n3)->check(CLI::PositiveNumber)->capture_default_str();
    c_synth->add_option("--rank", synth.rank, "Tubal rank of L0")->check(CLI::NonNegativeNumber)->capture_default_str();
    auto* o_m = c_synth->add_option("--m", synth.m, "Number of sparse entries")->check(CLI::NonNegativeNumber);
    c_synth->add_option("--deg", synth.deg, "Per-slice cap on sparse entries")
        ->check(CLI::NonNegativeNumber)
        ->excludes(o_m);
    c_synth->add_option("--factors", synth.factors, "gaussian (default) or flat")
        ->check(CLI::IsMember({"gaussian", "flat"}));
    c_synth->add_option("--magnitudes", synth.magnitudes)
        ->check(CLI::IsMember({"rademacher", "gaussian"}))
        ->capture_default_str();
    c_synth->add_option("--recipe", synth.recipe, "'certified' for the 256x256x3 certified instance")
        ->check(CLI::IsMember({"certified"}));
    c_synth->add_option("--seed", synth.seed)->capture_default_str();

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Recovery sweep over rank, sparsity and gamma; CSV output");
    c_sweep->add_option("--out", sweep.out, "CSV path")->required();
    c_sweep->add_option("--n1", sweep.n1)->check(CLI::PositiveNumber)->capture_default_str();
    c_sweep->add_option("--n2", sweep.n2)->check(CLI::PositiveNumber)->capture_default_str();
    c_sweep->add_option("--n3", sweep.n3)->check(CLI::PositiveNumber)->capture_default_str();
    c_sweep->add_option("--ranks", sweep.ranks, "Comma-separated tubal ranks")->delimiter(',')->capture_default_str();
    c_sweep->add_option("--m", sweep.ms, "Comma-separated sparse entry counts")->delimiter(',');
    c_sweep->add_option("--deg", sweep.degs, "Comma-separated per-slice caps")->delimiter(',');
    c_sweep->add_option("--ps", sweep.ps, "Interpolation points for gamma")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_sweep->add_option("--gammas", sweep.gammas, "Explicit gamma values")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--factors", sweep.factors)
        ->check(CLI::IsMember({"gaussian", "flat"}))
        ->capture_default_str();
    c_sweep->add_option("--penalty", sweep.penalty)
        ->check(CLI::IsMember({"l1", "tube", "slice"}))
        ->capture_default_str();
    c_sweep->add_option("--seed", sweep.seed)->capture_default_str();
    c_sweep->add_flag("--no-dual", sweep.no_dual, "Skip dual certificates");
    c_sweep->add_flag("--timing", sweep.timing, "Fill the seconds column (output is then not reproducible)");
    add_solver_flags(c_sweep, sweep.cfg);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitOk;
    try {
        if (c_tsvd->parsed()) code = run_tsvd(tsvd, out);
        else if (c_solve->parsed()) code = run_solve(solve, out, err);
        else if (c_cert->parsed()) code = run_certify(cert, out);
        else if (c_synth->parsed()) code = run_synth(synth, out);
        else code = run_sweep_cmd(sweep, out);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    if (verbose) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        err << "done in " << num(s) << " s, exit " << code << '\n';
    }
    return code;
}

} // namespace rtpca::cli
