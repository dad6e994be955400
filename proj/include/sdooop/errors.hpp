#pragma once

#include <stdexcept>
#include <string>

namespace sdooop {

// Parameter or spec values outside their documented domain.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Stream contract violations: out-of-order timestamps, dimension drift,
// non-finite features. Thrown before any state is mutated.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfOrderTimestamp : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyModel : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sdooop
