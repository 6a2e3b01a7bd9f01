#pragma once

#include <stdexcept>
#include <string>

namespace rtpca {

/// Base class of every error raised by the library. Carries the name of the
/// operation that failed so front ends can report it.
class Error : public std::runtime_error {
public:
    Error(std::string op, const std::string& what)
        : std::runtime_error(op + ": " + what), op_(std::move(op)) {}

    const std::string& op() const noexcept { return op_; }

private:
    std::string op_;
};

#define RTPCA_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        using Error::Error;                                                   \
    }

RTPCA_DEFINE_ERROR(ShapeMismatch);
RTPCA_DEFINE_ERROR(InvalidValue);
RTPCA_DEFINE_ERROR(SymmetryViolation);
RTPCA_DEFINE_ERROR(SizeOverflow);
RTPCA_DEFINE_ERROR(IndexOutOfRange);
RTPCA_DEFINE_ERROR(ConvergenceFailure);
RTPCA_DEFINE_ERROR(NonConvergence);
RTPCA_DEFINE_ERROR(NotAProjector);
RTPCA_DEFINE_ERROR(ZeroTensor);
RTPCA_DEFINE_ERROR(DomainError);
RTPCA_DEFINE_ERROR(RankTooLarge);
RTPCA_DEFINE_ERROR(InfeasiblePattern);
RTPCA_DEFINE_ERROR(ParseError);

#undef RTPCA_DEFINE_ERROR

} // namespace rtpca
