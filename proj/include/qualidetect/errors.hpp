#pragma once

#include <stdexcept>
#include <string>

namespace qualidetect {

/// Non-finite input or an argument outside a function's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Value outside the open range of a sigmoid (inverse undefined).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced while integrating a system.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Analysis precondition not met (too short a channel, diverged run, ...).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IOError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qualidetect
