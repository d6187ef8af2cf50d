#pragma once

#include <stdexcept>
#include <string>

namespace lclt {

enum class ErrorKind {
    invalid_parameter,
    domain,
    coverage,
    degenerate,
    numeric,
    resource_limit,
    checksum,
};

/// Every failure raised by the library carries one of the kinds above so the
/// harness can map it onto a process exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::degenerate: return "degenerate-distribution";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::checksum: return "checksum";
    }
    return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

} // namespace lclt
