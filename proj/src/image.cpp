#include "qse/image.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>

#include "qse/errors.hpp"

namespace qse::img {

namespace {

/// Reads one whitespace-delimited header token, skipping '#' comment lines.
std::string next_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = static_cast<char>(bytes[pos]);
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    std::string token;
    while (pos < bytes.size()) {
        const char c = static_cast<char>(bytes[pos]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
        token.push_back(c);
        ++pos;
    }
    if (token.empty()) throw FormatError("raster header truncated");
    return token;
}

int parse_header_int(std::span<const std::uint8_t> bytes, std::size_t& pos, const char* what) {
    const std::string token = next_token(bytes, pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw FormatError(std::string("bad ") + what + " in raster header");
    if (v <= 0) throw FormatError(std::string(what) + " must be positive");
    return v;
}

}  // namespace

Image Image::make(int width, int height, int channels) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw std::invalid_argument("channels must be 1 or 3");
    Image image;
    image.width = width;
    image.height = height;
    image.channels = channels;
    image.samples.assign(static_cast<std::size_t>(width) * height * channels, 0);
    return image;
}

std::vector<std::uint8_t> serialize(const Image& image, RasterFormat format) {
    const int needed = format == RasterFormat::pgm ? 1 : 3;
    if (image.channels != needed)
        throw std::invalid_argument(format == RasterFormat::pgm ? "PGM requires 1 channel"
                                                                : "PPM requires 3 channels");
    if (image.samples.size() != static_cast<std::size_t>(image.width) * image.height * image.channels)
        throw std::invalid_argument("sample buffer does not match image dimensions");

    std::string header = format == RasterFormat::pgm ? "P5\n" : "P6\n";
    header += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";

    std::vector<std::uint8_t> out;
    out.reserve(header.size() + image.samples.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), image.samples.begin(), image.samples.end());
    return out;
}

Image parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) throw FormatError("not a P5/P6 raster");
    std::size_t pos = 0;
    const std::string magic = next_token(bytes, pos);
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw FormatError("not a P5/P6 raster");

    const int width = parse_header_int(bytes, pos, "width");
    const int height = parse_header_int(bytes, pos, "height");
    const int maxval = parse_header_int(bytes, pos, "maxval");
    if (maxval != 255) throw FormatError("only maxval 255 rasters are supported");

    // Exactly one whitespace byte separates the header from the samples.
    if (pos >= bytes.size()) throw FormatError("raster payload missing");
    ++pos;

    Image image = Image::make(width, height, channels);
    if (bytes.size() - pos < image.samples.size()) throw FormatError("raster payload truncated");
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), image.samples.size(),
                image.samples.begin());
    return image;
}

Image read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse(bytes);
}

void write_image(const Image& image, const std::filesystem::path& path, RasterFormat format) {
    const auto bytes = serialize(image, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + path.string());
}

Image generate_test_image(int size, TestImageKind kind, std::uint64_t seed) {
    Image image = Image::make(size, size, 3);
    switch (kind) {
        case TestImageKind::gradient: {
            const double scale = size > 1 ? 255.0 / (size - 1) : 0.0;
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    image.at(x, y, 0) = static_cast<std::uint8_t>(x * scale);
                    image.at(x, y, 1) = static_cast<std::uint8_t>(y * scale);
                    image.at(x, y, 2) = static_cast<std::uint8_t>((x + y) * scale / 2.0);
                }
            }
            break;
        }
        case TestImageKind::noise: {
            Rng rng(seed);
            for (auto& s : image.samples) s = rng.next_byte();
            break;
        }
        case TestImageKind::blocks: {
            // 8x8 tiles from a small seed-driven palette; the histogram stays
            // concentrated on few values, unlike a cipher image.
            Rng rng(seed);
            std::array<std::array<std::uint8_t, 3>, 8> palette{};
            for (auto& color : palette)
                for (auto& ch : color) ch = rng.next_byte();
            const int tiles = (size + 7) / 8;
            for (int ty = 0; ty < tiles; ++ty) {
                for (int tx = 0; tx < tiles; ++tx) {
                    const auto& color = palette[rng.next_index(palette.size())];
                    for (int y = ty * 8; y < std::min(size, (ty + 1) * 8); ++y)
                        for (int x = tx * 8; x < std::min(size, (tx + 1) * 8); ++x)
                            for (int c = 0; c < 3; ++c)
                                image.at(x, y, c) = color[static_cast<std::size_t>(c)];
                }
            }
            break;
        }
    }
    return image;
}

}  // namespace qse::img
