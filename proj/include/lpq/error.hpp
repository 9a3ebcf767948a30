#pragma once

#include <stdexcept>
#include <string>

namespace lpq {

/// Failure categories. Each maps to a documented CLI exit code, see
/// exit_code_for().
enum class ErrorKind {
    Usage,      ///< bad command-line arguments or configuration values
    Data,       ///< unreadable or malformed input files
    Schema,     ///< unknown table/column or column type mismatch
    Type,       ///< ill-typed expression (cross-type comparison etc.)
    Planning,   ///< invalid query IR or illegal plan request
    Execution,  ///< runtime evaluation failure (e.g. unbound parameter)
    Invariant,  ///< internal protocol or invariant violation
};

class EngineError : public std::runtime_error {
  public:
    EngineError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw EngineError(kind, msg);
}

/// Process exit codes: 0 success, 2 usage, 3 data/schema, 4 planning,
/// 5 internal invariant.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Data:
        case ErrorKind::Schema:
        case ErrorKind::Type: return 3;
        case ErrorKind::Planning: return 4;
        case ErrorKind::Execution:
        case ErrorKind::Invariant: return 5;
    }
    return 5;
}

}  // namespace lpq
