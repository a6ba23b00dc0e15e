#ifndef APPSLICE_ERRORS_HPP
#define APPSLICE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace appslice {

/// Base class for all structured errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Document is not well-formed in the external format.
class SyntaxError : public Error {
public:
    using Error::Error;
};

/// An error tied to a specific location in a document, addressed with a
/// JSON-pointer style path ("/appSlice/perFunction/faceDetection/network").
class PathError : public Error {
public:
    PathError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Field missing, of the wrong type, or unknown.
class SchemaError : public PathError {
public:
    using PathError::PathError;
};

/// Field parsed but violates an invariant.
class ValidationError : public PathError {
public:
    using PathError::PathError;
};

/// Base class for fabric admission and bookkeeping failures.
class FabricError : public Error {
public:
    using Error::Error;
};

class InsufficientCompute : public FabricError {
public:
    using FabricError::FabricError;
};

class InsufficientBandwidth : public FabricError {
public:
    using FabricError::FabricError;
};

class LatencyUnsatisfiable : public FabricError {
public:
    using FabricError::FabricError;
};

class PERUnsatisfiable : public FabricError {
public:
    using FabricError::FabricError;
};

class UnknownSlice : public FabricError {
public:
    using FabricError::FabricError;
};

class UnknownTarget : public FabricError {
public:
    using FabricError::FabricError;
};

/// Raised by calibration lookups below the smallest anchor when floor
/// clamping is disabled.
class ProfileDomainError : public Error {
public:
    using Error::Error;
};

}  // namespace appslice

#endif  // APPSLICE_ERRORS_HPP
