#ifndef TBEN_ERROR_HPP
#define TBEN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tben {

// Base class for every error raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed tensor file header (magic, version, element type, rank, axes).
struct FormatError : Error {
    using Error::Error;
};

// Declared tensor size does not match the payload actually present.
struct TruncationError : Error {
    using Error::Error;
};

// Invalid values: non-finite data, empty inputs, inconsistent records.
struct DataError : Error {
    using Error::Error;
};

// Operation referenced an axis the tensor does not have.
struct AxisError : Error {
    using Error::Error;
};

// Vector/matrix extent mismatch between an operation and its input.
struct DimensionError : Error {
    using Error::Error;
};

// Label outside the class range or inconsistent with the hierarchy.
struct LabelError : Error {
    using Error::Error;
};

// Bad flags, bad pipeline spec, invalid training configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Synthetic dataset specification violates its preconditions.
struct SpecError : Error {
    using Error::Error;
};

// Filesystem-level failure (open/read/write).
struct IoError : Error {
    using Error::Error;
};

}  // namespace tben

#endif  // TBEN_ERROR_HPP
