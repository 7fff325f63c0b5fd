#ifndef DSR_ERRORS_HPP
#define DSR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsr {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched or invalid array shapes (image sizes, layer chains, blocks).
struct DimensionError : Error {
    using Error::Error;
};

/// A value outside its documented domain (quality, rank, label, ...).
struct ValueError : Error {
    using Error::Error;
};

/// Gram-Schmidt candidate collapsed onto the reference direction.
struct DegenerateDirectionError : Error {
    using Error::Error;
};

/// Plane construction failed (vanishing gradient or repeated degenerate v).
struct DegeneratePlaneError : Error {
    using Error::Error;
};

/// Bad magic string or unsupported version in a serialized payload.
struct FormatError : Error {
    using Error::Error;
};

/// Payload length does not match what its header promises.
struct CorruptionError : Error {
    using Error::Error;
};

/// Invalid experiment configuration (missing operator, bad key, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Required artifact not available (e.g. model not trained yet).
struct StateError : Error {
    using Error::Error;
};

/// A documented operation precondition does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

/// Filesystem-level failure (unwritable path, short read).
struct IoError : Error {
    using Error::Error;
};

} // namespace dsr

#endif // DSR_ERRORS_HPP
