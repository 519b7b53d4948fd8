// Error taxonomy shared by all hessfield components.
#pragma once

#include <stdexcept>
#include <string>

namespace hessfield {

enum class ErrorCode {
    InvalidMatrix,
    InvalidOrder,
    InvalidCone,
    NotAdmissible,
    InsufficientSamples,
    DiscretizationError,
    LineSearchStalled,
    MaxIterations,
    LinearSolveFailure,
    ContinuationStalled,
    CornerDomain,
    MissingGammaExtension,
    CertificateMissing,
    ConfigError,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidMatrix: return "InvalidMatrix";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::InvalidCone: return "InvalidCone";
        case ErrorCode::NotAdmissible: return "NotAdmissible";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::DiscretizationError: return "DiscretizationError";
        case ErrorCode::LineSearchStalled: return "LineSearchStalled";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::ContinuationStalled: return "ContinuationStalled";
        case ErrorCode::CornerDomain: return "CornerDomain";
        case ErrorCode::MissingGammaExtension: return "MissingGammaExtension";
        case ErrorCode::CertificateMissing: return "CertificateMissing";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

// Raised when a matrix leaves the admissibility cone; carries the offending
// margin and, when grid-based, the node index (-1 otherwise).
class NotAdmissibleError : public Error {
  public:
    NotAdmissibleError(double margin, long node = -1)
        : Error(ErrorCode::NotAdmissible,
                "cone margin " + std::to_string(margin) +
                    (node >= 0 ? " at node " + std::to_string(node) : "")),
          margin_(margin),
          node_(node) {}

    double margin() const { return margin_; }
    long node() const { return node_; }

  private:
    double margin_;
    long node_;
};

}  // namespace hessfield
