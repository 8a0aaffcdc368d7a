#pragma once

#include <stdexcept>
#include <string>

namespace netsize {

/// Scenario text that does not parse or validate; carries file:line context.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }

private:
    std::string file_;
    int line_;
};

/// Integration aborted (step-size underflow, non-finite state).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical routine failed to converge (eigen solver, bisection bracket).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace netsize
