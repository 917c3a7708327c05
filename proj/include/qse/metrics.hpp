#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qse/aes.hpp"
#include "qse/image.hpp"

namespace qse::metrics {

/// Shannon entropy of the byte-value distribution, log base 2, in
/// bits/symbol (0 for constant input, 8 for a perfectly uniform one).
/// Throws std::invalid_argument on empty input.
double shannon_entropy(std::span<const std::uint8_t> data);

/// Percentage of pixel positions where the two images differ in any
/// channel. Images must share a shape.
double npcr(const img::Image& a, const img::Image& b);

/// NPCR evaluated per channel, for comparison with single-channel
/// conventions.
std::vector<double> npcr_per_channel(const img::Image& a, const img::Image& b);

/// Mean absolute per-sample difference, normalized by 255, as a percentage.
double uaci(const img::Image& a, const img::Image& b);

struct Histogram {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::array<std::uint64_t, 256>> counts;  // one table per channel
};

Histogram histogram(const img::Image& image);

/// Rows "channel,bin,count" with a header line.
std::string histogram_csv(const Histogram& hist);

/// Grayscale bar chart, one 256-wide strip per channel, for side-by-side
/// comparison of original vs cipher histograms.
img::Image render_histogram(const Histogram& hist);

/// Ciphertext reinterpreted as a raster of the given shape (envelope header
/// dropped, bytes truncated to width*height*channels), so image-domain
/// metrics can compare plain and cipher data pixelwise.
img::Image ciphertext_as_image(const aes::CipherEnvelope& envelope, int width, int height,
                               int channels);

/// One evaluation row for an image/cipher pair: what the per-size report
/// tables are made of.
struct MetricsReport {
    std::string pixel_size;       // "WxH"
    double entropy_bits = 0.0;    // of the ciphertext view, in [0, 8]
    double npcr_percent = 0.0;    // original vs ciphertext view, in [0, 100]
    double uaci_percent = 0.0;    // original vs ciphertext view, in [0, 100]
    double encrypt_s = 0.0;
    double decrypt_s = 0.0;
};

/// Encrypt the image, time both directions, and compare the ciphertext view
/// against the original.
MetricsReport evaluate_image(const img::Image& original, const aes::AesKey& key,
                             const std::array<std::uint8_t, 16>& iv);

struct KeySensitivityReport {
    std::string digest_k1_hex;
    std::string digest_k2_hex;
    double npcr_wrong_key = 0.0;  // true plaintext vs wrong-key decryption
    double uaci_wrong_key = 0.0;
    bool correct_key_restores = false;
};

/// Encrypt with H(K1), decrypt with both H(K1) and H(K2) where K2 is K1
/// with one bit flipped. Throws std::invalid_argument when flip_index is
/// out of range.
KeySensitivityReport key_sensitivity_experiment(const img::Image& image, std::string_view key_bits,
                                                std::size_t flip_index,
                                                const std::array<std::uint8_t, 16>& iv);

struct TimingRow {
    std::string label;
    double encrypt_s = 0.0;
    double decrypt_s = 0.0;
};

/// Wall-clock encrypt/decrypt timings for square test images at the given
/// sizes, plus a trailing Average row. Empty input gives an empty table.
std::vector<TimingRow> timing_report(std::span<const int> sizes, const aes::AesKey& key,
                                     std::uint64_t image_seed);

std::string timing_csv(std::span<const TimingRow> rows);

}  // namespace qse::metrics
