#include "gjet/core/errors.hpp"

namespace gjet {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularE: return "SingularE";
    case ErrorKind::OutOfImage: return "OutOfImage";
    case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorKind::MassImbalance: return "MassImbalance";
    case ErrorKind::AnchorInadmissible: return "AnchorInadmissible";
    case ErrorKind::InfeasibleBracket: return "InfeasibleBracket";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message)
{
}

}  // namespace gjet
