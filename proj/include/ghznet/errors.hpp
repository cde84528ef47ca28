#pragma once

#include <stdexcept>
#include <string>

namespace ghznet {

/// Malformed input: a bad document, scenario or parameter. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument
{
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
    ValidationError(const std::string& what, int line)
        : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    /// 1-based source line, or 0 when the error is not tied to a line.
    int line() const { return line_; }

private:
    int line_ = 0;
};

/// No centre node can host the requested GHZ state. Maps to CLI exit code 3.
class InfeasibleError : public std::runtime_error
{
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// A protocol asked the network state for something impossible (e.g. consuming
/// an absent link). Always a routing bug; the trial must abort.
class ProtocolLogicError : public std::logic_error
{
public:
    explicit ProtocolLogicError(const std::string& what) : std::logic_error(what) {}
};

} // namespace ghznet
