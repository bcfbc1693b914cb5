#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace afc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, long line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

struct UnsupportedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct AssemblyError : Error {
    using Error::Error;
};

// Nonlinear or linear solver failure; carries the residual history that was
// accumulated before the failure.
struct SolveError : Error {
    SolveError(const std::string& msg, std::vector<double> history = {})
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

}  // namespace afc
