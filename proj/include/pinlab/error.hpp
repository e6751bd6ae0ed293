#pragma once

#include <stdexcept>
#include <string>

namespace pinlab {

// Invalid parameters or inputs; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double estimate = 0.0, double error_bound = 0.0)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

// A derived parameter set failed one of its own consistency inequalities.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Percolation surface could not be certified inside the window.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bisection endpoints do not bracket the pinned/escaped transition.
class BracketError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace pinlab
