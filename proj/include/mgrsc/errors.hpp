#pragma once

#include <stdexcept>
#include <string>

namespace mgrsc {

// Bad input data: malformed case files, violated invariants, inconsistent
// configuration. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: singular Jacobian, infeasible base case, rank-deficient
// regression. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    SolverError(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

}  // namespace mgrsc
