#pragma once

#include <stdexcept>
#include <string>

namespace histmine {

// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorKind {
    io,         // missing file, unreadable directory, unwritable output
    parse,      // malformed input data (JSONL line, timestamp, config)
    invariant,  // input violates a documented invariant (sequence gaps, ...)
    config,     // invalid configuration or bad operation arguments
    external,   // an external program (VCS adapter) failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace histmine
