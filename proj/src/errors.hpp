#pragma once

#include <stdexcept>
#include <string>

namespace tracesynth {

// Error categories shared with the C API status codes (see include/tracesynth.h).
enum class ErrorCode {
    io = 1,
    parse = 2,
    validation = 3,
    invalid_argument = 4,
    protocol = 5,
    connection = 6,
    timeout = 7,
    remote = 8,
    diverged = 9,
    limit = 10,
    internal = 11,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace tracesynth
