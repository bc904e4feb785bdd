#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kltrack {

// Base of all library errors. Every subclass carries a stable machine-readable
// code so front ends can map failures to exit statuses without string matching.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Invalid argument to a numeric kernel (probability outside (0,1), negative x, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("E_DOMAIN", message) {}
};

// Data and model layouts do not match (wrong column set, wrong lengths).
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("E_SHAPE", message) {}
};

// Design matrix is rank deficient.
class SingularDesignError : public Error {
public:
    explicit SingularDesignError(const std::string& message)
        : Error("E_SINGULAR_DESIGN", message) {}
};

// Complete or quasi-complete separation: the likelihood has no finite maximizer.
class SeparationError : public Error {
public:
    SeparationError(const std::string& message, std::vector<double> last_coefficients)
        : Error("E_SEPARATION", message), last_coefficients_(std::move(last_coefficients)) {}

    const std::vector<double>& last_coefficients() const noexcept { return last_coefficients_; }

private:
    std::vector<double> last_coefficients_;
};

// Optimizer ran out of iterations; carries the last iterate for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, std::vector<double> last_iterate)
        : Error("E_NO_CONVERGENCE", message), last_iterate_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

// A feature encoding cannot be built (e.g. terciles of a near-constant column).
class EncodingError : public Error {
public:
    explicit EncodingError(const std::string& message) : Error("E_ENCODING", message) {}
};

// Two fits cannot be compared (different samples, inconsistent inputs).
class ComparisonError : public Error {
public:
    explicit ComparisonError(const std::string& message) : Error("E_COMPARISON", message) {}
};

// A declared nesting relation is inconsistent with the fits.
class RelationError : public Error {
public:
    explicit RelationError(const std::string& message) : Error("E_RELATION", message) {}
};

// Interval bound search failed to bracket a crossing.
class SearchError : public Error {
public:
    explicit SearchError(const std::string& message) : Error("E_SEARCH", message) {}
};

// A simulation study had too many failed replications.
class StudyError : public Error {
public:
    explicit StudyError(const std::string& message) : Error("E_STUDY", message) {}
};

// Malformed input file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("E_PARSE", message) {}
};

// A referenced column does not exist.
class MissingColumnError : public Error {
public:
    explicit MissingColumnError(const std::string& message)
        : Error("E_MISSING_COLUMN", message) {}
};

}  // namespace kltrack
