#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergerflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input parameters (grid sizes, family parameters, operation preconditions).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A configuration file could not be parsed or validated.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, std::size_t line, const std::string& what)
        : Error(format(key, line, what)), key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, std::size_t line, const std::string& what) {
        std::string msg = "config error";
        if (line > 0) msg += " at line " + std::to_string(line);
        if (!key.empty()) msg += " [" + key + "]";
        return msg + ": " + what;
    }

    std::string key_;
    std::size_t line_;
};

/// Non-finite values or loss of positivity in the evolved fields.
class NumericalBreakdown : public Error {
public:
    NumericalBreakdown(const std::string& what, std::size_t node, double x)
        : Error(what + " at node " + std::to_string(node) + " (x = " + std::to_string(x) + ")"),
          node_(node), x_(x) {}

    std::size_t node() const noexcept { return node_; }
    double x() const noexcept { return x_; }

private:
    std::size_t node_;
    double x_;
};

/// The adaptive step would drop below dt_min.
class ResolutionExhausted : public Error {
public:
    ResolutionExhausted(const std::string& what, double dt) : Error(what), dt_(dt) {}

    double dt() const noexcept { return dt_; }

private:
    double dt_;
};

/// Malformed or incompatible files (snapshots, time series, profiles).
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace bergerflow
