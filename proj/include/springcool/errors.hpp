#pragma once

#include <stdexcept>
#include <string>

namespace springcool {

enum class ErrorCategory { Config, Instability, Convergence, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& msg)
        : std::runtime_error(msg), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Bad parameter values, domain violations, malformed configs.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

/// Closed loop (or static spring) is unstable; message carries the violated inequality.
class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& msg) : Error(ErrorCategory::Instability, msg) {}
};

/// Quadrature or optimizer failed to converge within budget.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(ErrorCategory::Convergence, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorCategory::Io, msg) {}
};

}  // namespace springcool
