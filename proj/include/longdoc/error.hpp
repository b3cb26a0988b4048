#pragma once

#include <stdexcept>
#include <string>

namespace longdoc {

enum class ErrorKind {
    empty_document,
    alignment_gap,
    schema,
    config,
    context_overflow,
    backend,
    shape_mismatch,
    zero_norm,
    invalid_k,
    empty_gold,
    missing_subqueries,
    insufficient_points,
};

const char* error_kind_name(ErrorKind kind);

/// Single exception type for the toolkit; the kind drives CLI exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace longdoc
