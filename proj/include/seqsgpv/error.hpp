#pragma once

#include <stdexcept>
#include <string>

namespace seqsgpv {

/// Invalid argument to a library operation (malformed interval, bad design, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration. The message carries the field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (outcome pools).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output location cannot be written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace seqsgpv
