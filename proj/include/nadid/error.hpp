#pragma once

#include <stdexcept>
#include <string>

namespace nadid {

// Error categories map onto the CLI exit-code contract:
// ValidationError -> 1, IoError -> 2, SolverError -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class SolverError : public Error {
public:
    SolverError(const std::string& msg, double residual)
        : Error(msg), kkt_residual(residual) {}
    double kkt_residual;
};

}  // namespace nadid
