#pragma once

#include <array>
#include <cstdint>

#include "qse/image.hpp"

namespace qse::stego {

inline constexpr std::array<std::uint8_t, 2> kMagic = {'S', 'G'};

/// Embedded header: magic "SG", secret width and height (32-bit BE), secret
/// channel count, and the k used for the payload. 12 bytes, written through
/// the same k low-order bits as the payload.
inline constexpr std::size_t kHeaderBytes = 2 + 4 + 4 + 1 + 1;

/// Secret payload bytes that fit a cover at k bits per channel sample,
/// after the header. k must be 1, 2 or 4.
std::size_t capacity(const img::Image& cover, int bits_per_channel);

/// Hide a secret image in the k low-order bits of the cover's samples,
/// header first, row-major, most significant bit first. Only those k bits
/// change. Throws CapacityError when the secret does not fit.
img::Image embed(const img::Image& cover, const img::Image& secret, int bits_per_channel);

/// Recover the embedded secret, probing k in {1, 2, 4}. Throws FormatError
/// when no valid header is found.
img::Image extract(const img::Image& stego);

}  // namespace qse::stego
