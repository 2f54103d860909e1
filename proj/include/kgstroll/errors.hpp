#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgstroll {

// Malformed input at a known position. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, size_t line, size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}

    size_t line() const { return line_; }
    size_t column() const { return column_; }

private:
    size_t line_;
    size_t column_;
};

// Remote endpoint failure. Carries the HTTP status when one was received,
// 0 for transport-level failures.
class ConnectorError : public std::runtime_error {
public:
    ConnectorError(std::string msg, int status)
        : std::runtime_error(std::move(msg)), status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

// Response body that is not valid SPARQL results JSON.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A sampler was asked to weigh a hop outside its fitted statistics.
class UnfittedDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid pipeline / CLI configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Token lookup against a vocabulary that does not contain it.
class UnknownTokenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite loss observed while training; names the epoch (1-based).
class TrainingDivergedError : public std::runtime_error {
public:
    TrainingDivergedError(std::string msg, int epoch)
        : std::runtime_error(std::move(msg)), epoch_(epoch) {}

    int epoch() const { return epoch_; }

private:
    int epoch_;
};

}  // namespace kgstroll
