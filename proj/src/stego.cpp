#include "qse/stego.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

#include "qse/errors.hpp"

namespace qse::stego {

namespace {

void check_k(int k) {
    if (k != 1 && k != 2 && k != 4)
        throw std::invalid_argument("bits_per_channel must be 1, 2 or 4");
}

/// Streams bytes MSB-first into the k low-order bits of successive samples.
class BitWriter {
public:
    BitWriter(img::Image& image, int k) : image_(image), k_(k) {}

    void write_byte(std::uint8_t byte) {
        for (int bit = 7; bit >= 0;) {
            auto& sample = image_.samples[pos_];
            std::uint8_t chunk = 0;
            for (int i = 0; i < k_; ++i, --bit)
                chunk = static_cast<std::uint8_t>((chunk << 1) | ((byte >> bit) & 1));
            sample = static_cast<std::uint8_t>((sample & ~((1u << k_) - 1)) | chunk);
            ++pos_;
        }
    }

private:
    img::Image& image_;
    int k_;
    std::size_t pos_ = 0;
};

class BitReader {
public:
    BitReader(const img::Image& image, int k) : image_(image), k_(k) {}

    bool has_bytes(std::size_t n) const {
        return (image_.samples.size() - pos_) * static_cast<std::size_t>(k_) >= n * 8;
    }

    std::uint8_t read_byte() {
        std::uint8_t byte = 0;
        for (int bit = 0; bit < 8; bit += k_) {
            const std::uint8_t chunk =
                static_cast<std::uint8_t>(image_.samples[pos_++] & ((1u << k_) - 1));
            byte = static_cast<std::uint8_t>((byte << k_) | chunk);
        }
        return byte;
    }

private:
    const img::Image& image_;
    int k_;
    std::size_t pos_ = 0;
};

std::array<std::uint8_t, kHeaderBytes> encode_header(const img::Image& secret, int k) {
    std::array<std::uint8_t, kHeaderBytes> h{};
    h[0] = kMagic[0];
    h[1] = kMagic[1];
    const auto be32 = [&](std::size_t off, std::uint32_t v) {
        h[off] = static_cast<std::uint8_t>(v >> 24);
        h[off + 1] = static_cast<std::uint8_t>(v >> 16);
        h[off + 2] = static_cast<std::uint8_t>(v >> 8);
        h[off + 3] = static_cast<std::uint8_t>(v);
    };
    be32(2, static_cast<std::uint32_t>(secret.width));
    be32(6, static_cast<std::uint32_t>(secret.height));
    h[10] = static_cast<std::uint8_t>(secret.channels);
    h[11] = static_cast<std::uint8_t>(k);
    return h;
}

struct DecodedHeader {
    std::uint32_t width;
    std::uint32_t height;
    int channels;
    int k;
};

std::optional<DecodedHeader> try_decode_header(BitReader& reader, int probe_k) {
    std::array<std::uint8_t, kHeaderBytes> h{};
    for (auto& b : h) b = reader.read_byte();
    if (h[0] != kMagic[0] || h[1] != kMagic[1]) return std::nullopt;

    const auto be32 = [&](std::size_t off) {
        return (static_cast<std::uint32_t>(h[off]) << 24) |
               (static_cast<std::uint32_t>(h[off + 1]) << 16) |
               (static_cast<std::uint32_t>(h[off + 2]) << 8) | static_cast<std::uint32_t>(h[off + 3]);
    };
    DecodedHeader decoded{be32(2), be32(6), h[10], h[11]};
    if (decoded.k != probe_k) return std::nullopt;
    if (decoded.channels != 1 && decoded.channels != 3) return std::nullopt;
    if (decoded.width == 0 || decoded.height == 0) return std::nullopt;
    if (decoded.width > (1u << 20) || decoded.height > (1u << 20)) return std::nullopt;
    return decoded;
}

}  // namespace

std::size_t capacity(const img::Image& cover, int bits_per_channel) {
    check_k(bits_per_channel);
    const std::size_t total_bytes =
        cover.sample_count() * static_cast<std::size_t>(bits_per_channel) / 8;
    return total_bytes > kHeaderBytes ? total_bytes - kHeaderBytes : 0;
}

img::Image embed(const img::Image& cover, const img::Image& secret, int bits_per_channel) {
    check_k(bits_per_channel);
    const std::size_t available = capacity(cover, bits_per_channel);
    if (secret.sample_count() > available)
        throw CapacityError(secret.sample_count(), available);

    img::Image stego = cover;
    BitWriter writer(stego, bits_per_channel);
    for (std::uint8_t b : encode_header(secret, bits_per_channel)) writer.write_byte(b);
    for (std::uint8_t b : secret.samples) writer.write_byte(b);
    return stego;
}

img::Image extract(const img::Image& stego) {
    for (int k : {1, 2, 4}) {
        BitReader reader(stego, k);
        if (!reader.has_bytes(kHeaderBytes)) continue;
        const auto header = try_decode_header(reader, k);
        if (!header) continue;

        const std::size_t payload = static_cast<std::size_t>(header->width) * header->height *
                                    static_cast<std::size_t>(header->channels);
        if (!reader.has_bytes(payload)) continue;

        img::Image secret = img::Image::make(static_cast<int>(header->width),
                                             static_cast<int>(header->height), header->channels);
        for (auto& b : secret.samples) b = reader.read_byte();
        return secret;
    }
    throw FormatError("no steganographic payload found");
}

}  // namespace qse::stego
