#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qse::sha256 {

/// One 512-bit block as sixteen big-endian 32-bit words.
using MessageBlock = std::array<std::uint32_t, 16>;

/// The eight chaining words H0..H7.
using ChainState = std::array<std::uint32_t, 8>;

struct HashDigest {
    ChainState h{};

    std::array<std::uint8_t, 32> bytes() const;
    std::string hex() const;  // 64 lowercase hex chars, big-endian word order
};

/// FIPS padding: 0x80, zeros, then the 64-bit big-endian bit length, to a
/// 64-byte multiple.
std::vector<std::uint8_t> pad_message(std::span<const std::uint8_t> message);

/// Expand a block to the 64-word schedule.
std::array<std::uint32_t, 64> message_schedule(const MessageBlock& block);

/// One application of the compression function.
ChainState compress(const ChainState& state, const MessageBlock& block);

HashDigest digest(std::span<const std::uint8_t> data);
HashDigest digest(std::string_view text);

/// Hash a protocol key given as a '0'/'1' character string. The bits are
/// hashed as their ASCII encoding, so the digest doubles as a fixed-length
/// commitment that hides the key length. Throws std::invalid_argument on an
/// empty or non-binary string.
HashDigest derive_key(std::string_view key_bits);

}  // namespace qse::sha256
