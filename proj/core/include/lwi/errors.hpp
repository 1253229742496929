#pragma once

#include <stdexcept>

namespace lwi {

// Bad user input: unreadable paths, malformed config, unknown feature names.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent market data that prevents continuing.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant. Indicates a bug, not bad input.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lwi
