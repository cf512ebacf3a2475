#ifndef NETOBS_ERRORS_HPP
#define NETOBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netobs {

/// Machine-readable reason attached to every structured failure.
enum class ErrorCode {
    // graph validation
    DuplicateNodeId,
    DuplicateEdgeId,
    DanglingEndpoint,
    LengthNonPositive,
    Disconnected,
    BoundaryFlagMismatch,
    EmptyGraph,
    // structural operations
    NotATree,
    TooFewInnerNodes,
    CycleUnsensed,
    SensorOffGrid,
    // solver
    IncommensurableLengths,
    NonFiniteState,
    // analysis
    WindowOutOfRange,
    HorizonTooShort,
    NonPositiveL,
    // i/o
    BadInput,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace netobs

#endif
