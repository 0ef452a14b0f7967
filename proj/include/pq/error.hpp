#pragma once

#include <stdexcept>
#include <string>

namespace pq {

/// Base class for every error raised by the toolkit. The category maps onto
/// the CLI exit code.
class Error : public std::runtime_error {
public:
    enum class Category { config = 2, numerical = 3, contract = 4 };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    Category category_;
};

/// Invalid input values, malformed files, bad configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

/// Root finders, fits and eigen-solves that did not converge, or sample points
/// that sit on a singularity.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(Category::numerical, what) {}
};

/// A physical or mathematical precondition of an operation does not hold
/// (Foster positivity, transmon limit, quartic-expansion validity).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(Category::contract, what) {}
};

class PoleProximityError : public NumericalError {
public:
    PoleProximityError(const std::string& what, double omega)
        : NumericalError(what), omega_(omega) {}
    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

}  // namespace pq
