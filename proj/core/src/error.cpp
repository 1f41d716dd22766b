#include "csflow/error.hpp"

namespace csflow {

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NotPositiveRoot: return "NotPositiveRoot";
    case ErrorKind::NotSimpleNegativeRoot: return "NotSimpleNegativeRoot";
    case ErrorKind::WeightPairingNonzero: return "WeightPairingNonzero";
    case ErrorKind::NoDecomposition: return "NoDecomposition";
    case ErrorKind::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorKind::ClosureViolation: return "ClosureViolation";
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::NotInSpan: return "NotInSpan";
    case ErrorKind::NonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case ErrorKind::NonHermitianOmega: return "NonHermitianOmega";
    case ErrorKind::NonHermitianBlocks: return "NonHermitianBlocks";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularY: return "SingularY";
    case ErrorKind::QuadratureResolutionTooCoarse: return "QuadratureResolutionTooCoarse";
    case ErrorKind::InvalidSpin: return "InvalidSpin";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Error";
}

} // namespace csflow
