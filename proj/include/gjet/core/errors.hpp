#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gjet {

enum class ErrorKind {
    DomainViolation,
    RangeViolation,
    NoRoot,
    NoConvergence,
    SingularE,
    OutOfImage,
    UnsupportedGeometry,
    MassImbalance,
    AnchorInadmissible,
    InfeasibleBracket,
    InvalidArgument,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this exception type.
class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

  private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace gjet
