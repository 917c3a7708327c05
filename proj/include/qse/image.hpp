#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qse/rng.hpp"

namespace qse::img {

/// 8-bit raster, row-major, channel-interleaved. channels is 1 (gray) or 3
/// (RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> samples;

    std::size_t sample_count() const { return samples.size(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t& at(int x, int y, int c) {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& other) const {
        return width == other.width && height == other.height && channels == other.channels;
    }

    /// Zero-filled image; validates dimensions and channel count.
    static Image make(int width, int height, int channels);
};

enum class RasterFormat { pgm, ppm };  // binary P5 / P6, maxval 255

/// Canonical encoding: "P5\n<w> <h>\n255\n" or "P6\n...", then raw samples.
/// Identical images serialize to identical bytes.
std::vector<std::uint8_t> serialize(const Image& image, RasterFormat format);

/// Parse P5/P6 bytes. Header comments ('#' lines) are skipped; maxval must
/// be 255. Throws FormatError otherwise.
Image parse(std::span<const std::uint8_t> bytes);

Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path, RasterFormat format);

enum class TestImageKind { gradient, noise, blocks };

/// Deterministic stand-ins for photographic test material: a smooth
/// gradient, uniform noise, and a blocky image with a strongly structured
/// histogram. Always 3 channels.
Image generate_test_image(int size, TestImageKind kind, std::uint64_t seed);

}  // namespace qse::img
