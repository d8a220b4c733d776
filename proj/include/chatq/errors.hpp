#pragma once

#include <stdexcept>
#include <string>

namespace chatq {

// Argument outside the mathematical domain of an operation (negative budget,
// probability outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A function handed to a numeric routine produced non-finite values or
// violated a structural requirement (e.g. zero point density where the
// source has mass).
class InvalidProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No admissible design exists for the requested parameters: K <= L, rate
// below the indicator cost, budget exhausted by chatting.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inconsistent configuration (bank/spec mismatch, unsupported topology).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed network spec file. Carries the offending line and key.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string key, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": key '" + key + "': " + what),
          line_(line),
          key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

} // namespace chatq
