#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfep {

enum class ErrorKind {
    invalid_argument,
    unsupported_observable,
    invalid_weights,
    landauer_violation,
    invalid_partition,
    memory_full,
    thermodynamic_starvation,
    conditioning_on_null,
    insufficient_data,
    resource_limit,
    parse_error,
    validation_error,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (and the CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string &what) {
    if (!cond) fail(kind, what);
}

}  // namespace qfep
