#pragma once

#include <stdexcept>
#include <string>

namespace thz {

/// Category of a failure; the CLI maps these onto exit codes.
enum class ErrorKind {
    Format,        ///< container magic/version mismatch
    Corruption,    ///< truncated or inconsistent container payload
    Validation,    ///< a value violates a domain invariant
    Configuration, ///< inconsistent or unusable parameters
    Domain,        ///< input outside an operation's domain (e.g. negative Poisson mean)
    Io,            ///< filesystem failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Stable machine-readable code for an error kind (e.g. "E_FORMAT").
const char* error_code(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace thz
