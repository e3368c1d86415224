#pragma once

#include <stdexcept>
#include <string>

namespace stp {

struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

struct OutOfBounds : std::out_of_range {
    explicit OutOfBounds(const std::string& msg) : std::out_of_range(msg) {}
};

struct DegenerateGeometry : std::runtime_error {
    explicit DegenerateGeometry(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyNegatives : std::runtime_error {
    explicit EmptyNegatives(const std::string& msg) : std::runtime_error(msg) {}
};

struct InitializationFailure : std::runtime_error {
    explicit InitializationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LoadError : std::runtime_error {
    explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stp
