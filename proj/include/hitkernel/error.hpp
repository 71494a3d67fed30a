#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitkernel {

// Categories map onto CLI exit codes and the JSON "reason" field.
enum class ErrorKind {
    invalid_argument,
    overflow,
    guard,       // size guard or memory threshold; exit code 2
    infeasible,  // requested computation cannot proceed; exit code 2
    parse,
    io,
    internal,    // solver invariant violated; exit code 1
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::guard: return "guard";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view reason() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond)
        throw Error(kind, what);
}

}  // namespace hitkernel
