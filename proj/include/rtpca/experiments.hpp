#pragma once

// Synthetic (L0, E0) instances and the recovery sweep harness.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtpca/certify.hpp"
#include "rtpca/solver.hpp"
#include "rtpca/tensor.hpp"

namespace rtpca {

/// gaussian: L0 = P * Q^T with standard normal P, Q.
/// flat: orthonormal factors whose Fourier slices have entries of constant
/// modulus 1/sqrt(N), which makes beta(U) = sqrt(R / N1) and beta(V) =
/// sqrt(R / N2) exactly. R > 1 needs N1 and N2 to be powers of two.
enum class FactorLaw { gaussian, flat };

enum class MagnitudeLaw { rademacher, gaussian };

struct SparsePattern {
    enum class Kind { random_m_entries, per_slice_capped };
    Kind kind = Kind::random_m_entries;
    Index count = 0; // m, or the per-slice cap

    static SparsePattern random_m(Index m) { return {Kind::random_m_entries, m}; }
    static SparsePattern capped(Index deg) { return {Kind::per_slice_capped, deg}; }
};

std::string to_string(const SparsePattern& p);

struct InstanceSpec {
    Dims dims;
    Index rank = 1;
    SparsePattern pattern;
    MagnitudeLaw magnitudes = MagnitudeLaw::rademacher;
    FactorLaw factors = FactorLaw::gaussian;
    std::uint64_t seed = 0;
};

struct Instance {
    Tensor3 L0;
    Tensor3 E0;
    Tensor3 X;
};

/// splitmix64 step, used to derive independent per-cell seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Throws RankTooLarge if R > min(N1, N2). The tubal rank of the result is
/// checked against R.
Tensor3 gen_low_tubal_rank(const Dims& dims, Index rank, std::uint64_t seed,
                           FactorLaw law = FactorLaw::gaussian);

/// Throws InfeasiblePattern when the pattern cannot be placed in dims. The
/// entry count or degree cap is checked on the result.
Tensor3 gen_sparse(const Dims& dims, const SparsePattern& pattern, std::uint64_t seed,
                   MagnitudeLaw law = MagnitudeLaw::rademacher);

Instance make_instance(const InstanceSpec& spec);

/// 256 x 256 x 3, R = 1, a single +-1 entry in E0, flat factors. Generation is
/// retried with fresh seeds until inc(L0) < 1/12.
struct CertifiedInstance {
    Instance instance;
    InstanceSpec spec;
    double inc = 0.0;
    int attempts = 0;
};

inline constexpr int kRecipeMaxAttempts = 64;

/// Throws InfeasiblePattern if no attempt meets the incoherence target.
CertifiedInstance certified_recipe(std::uint64_t seed, FactorLaw law = FactorLaw::flat,
                                   int max_attempts = kRecipeMaxAttempts);

inline constexpr double kSuccessThreshold = 1e-5;

struct SweepGrid {
    Dims dims{32, 32, 3};
    std::vector<Index> ranks{1};
    std::vector<SparsePattern> patterns{SparsePattern::random_m(1)};
    std::vector<double> ps{0.5};         // gamma = interpolation at p
    std::vector<double> gammas;          // explicit gamma values
    FactorLaw factors = FactorLaw::gaussian;
    MagnitudeLaw magnitudes = MagnitudeLaw::rademacher;
    std::uint64_t seed = 1;
    bool run_dual = true;
};

struct SweepCell {
    Index r = 0;
    std::string pattern;
    double sparsity = 0.0; // nnz(E0) / (N1 N2 N3)
    double gamma = 0.0;
    double p = 0.0; // NaN for explicit gamma
    double inc = 0.0;
    double mu = 0.0;
    Index deg_max = 0;
    bool cert_ok = false;
    bool dual_ok = false;
    double err_L = 0.0;
    double err_E = 0.0;
    bool success = false;
    double seconds = 0.0;
    std::string error;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

/// Worker count: RTPCA_THREADS if set and positive, else the hardware count.
unsigned worker_count();

/// One instance per (rank, pattern); one cell per requested gamma on it.
/// Cell failures are recorded in SweepCell::error; the sweep never aborts.
SweepResult run_sweep(const SweepGrid& grid, const SolverConfig& solver_template,
                      unsigned threads = 0);

/// Header r,sparsity,gamma,p,inc,mu,deg_max,cert_ok,dual_ok,err_L,err_E,success,seconds.
/// The seconds column is NA unless `timing` is set, so repeated runs match byte
/// for byte.
void write_csv(std::ostream& out, const SweepResult& result, bool timing = false);

} // namespace rtpca
