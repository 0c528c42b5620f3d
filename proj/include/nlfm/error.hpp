#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlfm {

enum class ErrorKind {
    InvalidParameter,
    OutOfBand,
    OutOfDomain,
    Underdetermined,
    InsufficientData,
    Aliasing,
    InvalidInput,
    DegenerateMainlobe,
    InvalidComparison,
    NumericalFailure,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::OutOfBand: return "out_of_band";
    case ErrorKind::OutOfDomain: return "out_of_domain";
    case ErrorKind::Underdetermined: return "underdetermined";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Aliasing: return "aliasing";
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::DegenerateMainlobe: return "degenerate_mainlobe";
    case ErrorKind::InvalidComparison: return "invalid_comparison";
    case ErrorKind::NumericalFailure: return "numerical_failure";
    case ErrorKind::Io: return "io_error";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

} // namespace nlfm
