#ifndef PR_ERRORS_HPP
#define PR_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector/matrix length or image shape mismatch.
struct ShapeError : Error {
    using Error::Error;
};

/// Zero or otherwise unusable dimension request.
struct DimensionError : Error {
    using Error::Error;
};

/// Bad layer-index range in subnetwork operations.
struct RangeError : Error {
    using Error::Error;
};

/// Activation trace does not match the requested backward pass.
struct TraceError : Error {
    using Error::Error;
};

/// Malformed binary file; carries the byte offset of the defect.
struct FormatError : Error {
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::uint64_t byte_offset;
};

/// Structurally valid file whose contents violate an invariant.
struct ValidationError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

/// Optimization produced a NaN; carries the iteration (or epoch) index.
struct DivergenceError : Error {
    DivergenceError(const std::string& what, long index)
        : Error(what + " (at index " + std::to_string(index) + ")"), at_index(index) {}
    long at_index;
};

/// Every restart of a multi-start run failed.
struct AggregateError : Error {
    using Error::Error;
};

}  // namespace pr

#endif
