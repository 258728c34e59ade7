#pragma once

#include <stdexcept>
#include <string>

namespace fluodecon {

// Bad user-facing configuration: unknown keys, malformed values, invalid
// parameter combinations. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and format failures while reading or writing data. Exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite intermediates or other numerical breakdowns. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fluodecon
