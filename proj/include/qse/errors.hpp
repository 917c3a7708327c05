#pragma once

#include <stdexcept>
#include <string>

namespace qse {

/// Malformed raster file: bad magic, truncated payload, unsupported maxval.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed cipher envelope: bad magic or truncated framing.
class CryptoFormatError : public std::runtime_error {
public:
    explicit CryptoFormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Steganographic payload does not fit the cover image.
class CapacityError : public std::runtime_error {
public:
    CapacityError(std::size_t required_bytes, std::size_t available_bytes)
        : std::runtime_error("payload needs " + std::to_string(required_bytes) +
                             " bytes but cover holds " + std::to_string(available_bytes)),
          required(required_bytes),
          available(available_bytes) {}

    std::size_t required;
    std::size_t available;
};

/// A statistic cannot be estimated because a required sample cell is empty.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qse
