#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relbgk {

/// Base of every error raised by the library. `kind()` is a short stable tag
/// used as the machine-parseable prefix in CLI error lines.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char *kind() const noexcept = 0;
};

/// Argument outside the mathematical domain of an operation.
class DomainError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "domain"; }
};

/// Invalid grid, solver or run configuration.
class ConfigError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "config"; }
};

/// Moment data that no nonnegative distribution can produce, e.g. a Bessel
/// ratio argument >= 1 coming out of quadrature.
class InconsistencyError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "inconsistency"; }
};

class NumericalError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "numerical"; }
};

class NoSolutionError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "no-solution"; }
};

class ConvergenceError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "convergence"; }
};

/// Malformed input files (JSON syntax, snapshot magic, checksums).
class ParseError final : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char *kind() const noexcept override { return "parse"; }
};

/// One failed schema constraint: the JSON key path and what it requires.
struct Violation {
    std::string path;
    std::string constraint;
};

/// A configuration that parsed but failed validation; carries every violation.
class ValidationError final : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations))
    {
    }
    [[nodiscard]] const char *kind() const noexcept override { return "validation"; }
    [[nodiscard]] const std::vector<Violation> &violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation> &v)
    {
        std::string out;
        for (const auto &item : v) {
            if (!out.empty()) {
                out += "; ";
            }
            out += item.path + ": " + item.constraint;
        }
        return out;
    }
    std::vector<Violation> violations_;
};

} // namespace relbgk
