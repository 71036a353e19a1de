#pragma once

#include <stdexcept>
#include <string>

namespace eventcast {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind {
    Io = 1,        // missing/unreadable files, malformed CSV
    Config = 2,    // bad pattern text, bad JSON, inconsistent options
    Budget = 3,    // state budget exceeded during construction
    Internal = 4,  // broken invariant; always a bug
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }
[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void throw_budget(const std::string& msg) { throw Error(ErrorKind::Budget, msg); }
[[noreturn]] inline void throw_internal(const std::string& msg) { throw Error(ErrorKind::Internal, msg); }

}  // namespace eventcast
