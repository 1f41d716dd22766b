#pragma once

#include <stdexcept>
#include <string>

namespace csflow {

enum class ErrorKind {
    NotPositiveRoot,
    NotSimpleNegativeRoot,
    WeightPairingNonzero,
    NoDecomposition,
    AntisymmetryViolation,
    ClosureViolation,
    JacobiViolation,
    UnknownGenerator,
    NotInSpan,
    NonHermitianHamiltonian,
    NonHermitianOmega,
    NonHermitianBlocks,
    DimensionMismatch,
    SingularY,
    QuadratureResolutionTooCoarse,
    InvalidSpin,
    OutOfChart,
    SingularMetric,
    Config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace csflow
