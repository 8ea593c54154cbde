#pragma once

#include <stdexcept>
#include <string>

namespace hkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct TruncationMismatch : Error { using Error::Error; };
struct ZeroSeries : Error { using Error::Error; };
struct ZeroDivisor : Error { using Error::Error; };
struct NonzeroConstantTerm : Error { using Error::Error; };
struct InsufficientTruncation : Error { using Error::Error; };
struct FibreMismatch : Error { using Error::Error; };

// Input validation failure; the message carries the path of the offending field.
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
    SchemaError(const std::string& path, const std::string& msg)
        : Error(path + ": " + msg) {}
};

} // namespace hkit
