#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtpca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConditionFailed = 3;

/// Runs one subcommand (tsvd, solve, certify, synth, sweep). `args` excludes
/// the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rtpca::cli
