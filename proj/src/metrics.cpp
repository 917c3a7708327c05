#include "qse/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qse/sha256.hpp"

namespace qse::metrics {

namespace {

void check_same_shape(const img::Image& a, const img::Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("images must share dimensions and channels");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double shannon_entropy(std::span<const std::uint8_t> data) {
    if (data.empty()) throw std::invalid_argument("entropy of empty input is undefined");
    std::array<std::uint64_t, 256> counts{};
    for (std::uint8_t b : data) ++counts[b];

    const double n = static_cast<double>(data.size());
    double h = 0.0;
    for (std::uint64_t c : counts) {
        if (c == 0) continue;  // 0*log(0) contributes nothing
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double npcr(const img::Image& a, const img::Image& b) {
    check_same_shape(a, b);
    std::size_t changed = 0;
    const std::size_t pixels = a.pixel_count();
    for (std::size_t p = 0; p < pixels; ++p) {
        for (int c = 0; c < a.channels; ++c) {
            if (a.samples[p * a.channels + c] != b.samples[p * a.channels + c]) {
                ++changed;
                break;
            }
        }
    }
    return 100.0 * static_cast<double>(changed) / static_cast<double>(pixels);
}

std::vector<double> npcr_per_channel(const img::Image& a, const img::Image& b) {
    check_same_shape(a, b);
    std::vector<double> out(static_cast<std::size_t>(a.channels), 0.0);
    const std::size_t pixels = a.pixel_count();
    for (int c = 0; c < a.channels; ++c) {
        std::size_t changed = 0;
        for (std::size_t p = 0; p < pixels; ++p)
            if (a.samples[p * a.channels + c] != b.samples[p * a.channels + c]) ++changed;
        out[static_cast<std::size_t>(c)] = 100.0 * static_cast<double>(changed) / static_cast<double>(pixels);
    }
    return out;
}

double uaci(const img::Image& a, const img::Image& b) {
    check_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        sum += std::abs(static_cast<int>(a.samples[i]) - static_cast<int>(b.samples[i]));
    return 100.0 * sum / (255.0 * static_cast<double>(a.samples.size()));
}

Histogram histogram(const img::Image& image) {
    Histogram hist;
    hist.width = image.width;
    hist.height = image.height;
    hist.channels = image.channels;
    hist.counts.assign(static_cast<std::size_t>(image.channels), {});
    const std::size_t pixels = image.pixel_count();
    for (std::size_t p = 0; p < pixels; ++p)
        for (int c = 0; c < image.channels; ++c)
            ++hist.counts[static_cast<std::size_t>(c)][image.samples[p * image.channels + c]];
    return hist;
}

std::string histogram_csv(const Histogram& hist) {
    std::ostringstream out;
    out << "channel,bin,count\n";
    for (int c = 0; c < hist.channels; ++c)
        for (int bin = 0; bin < 256; ++bin)
            out << c << ',' << bin << ',' << hist.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(bin)]
                << '\n';
    return out.str();
}

img::Image render_histogram(const Histogram& hist) {
    constexpr int kBarHeight = 100;
    const int height = kBarHeight * hist.channels;
    img::Image chart = img::Image::make(256, height, 1);

    for (int c = 0; c < hist.channels; ++c) {
        const auto& counts = hist.counts[static_cast<std::size_t>(c)];
        const std::uint64_t peak = std::max<std::uint64_t>(
            1, *std::max_element(counts.begin(), counts.end()));
        const int base = (c + 1) * kBarHeight - 1;
        for (int bin = 0; bin < 256; ++bin) {
            const int bar = static_cast<int>(static_cast<double>(counts[static_cast<std::size_t>(bin)]) /
                                             static_cast<double>(peak) * (kBarHeight - 1));
            for (int y = 0; y <= bar; ++y) chart.at(bin, base - y, 0) = 255;
        }
    }
    return chart;
}

img::Image ciphertext_as_image(const aes::CipherEnvelope& envelope, int width, int height,
                               int channels) {
    img::Image image = img::Image::make(width, height, channels);
    if (envelope.ciphertext.size() < image.samples.size())
        throw std::invalid_argument("ciphertext shorter than requested raster");
    std::copy_n(envelope.ciphertext.begin(), image.samples.size(), image.samples.begin());
    return image;
}

MetricsReport evaluate_image(const img::Image& original, const aes::AesKey& key,
                             const std::array<std::uint8_t, 16>& iv) {
    MetricsReport report;
    report.pixel_size = std::to_string(original.width) + "x" + std::to_string(original.height);

    const auto t0 = std::chrono::steady_clock::now();
    const aes::CipherEnvelope envelope = aes::encrypt_payload(original.samples, key, iv);
    report.encrypt_s = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const auto plain = aes::decrypt_payload(envelope, key);
    report.decrypt_s = seconds_since(t1);
    if (plain != original.samples) throw std::logic_error("cipher round trip failed");

    const img::Image view =
        ciphertext_as_image(envelope, original.width, original.height, original.channels);
    report.entropy_bits = shannon_entropy(view.samples);
    report.npcr_percent = npcr(original, view);
    report.uaci_percent = uaci(original, view);
    return report;
}

KeySensitivityReport key_sensitivity_experiment(const img::Image& image, std::string_view key_bits,
                                                std::size_t flip_index,
                                                const std::array<std::uint8_t, 16>& iv) {
    if (flip_index >= key_bits.size())
        throw std::invalid_argument("flip_index must address a key bit");

    std::string flipped(key_bits);
    flipped[flip_index] = flipped[flip_index] == '0' ? '1' : '0';

    const sha256::HashDigest d1 = sha256::derive_key(key_bits);
    const sha256::HashDigest d2 = sha256::derive_key(flipped);
    const aes::AesKey k1 = aes::AesKey::from_digest(d1);
    const aes::AesKey k2 = aes::AesKey::from_digest(d2);

    // Raw samples as the payload: the wrong-key plaintext then reinterprets
    // directly as a raster of the original shape.
    const aes::CipherEnvelope envelope = aes::encrypt_payload(image.samples, k1, iv);

    const std::vector<std::uint8_t> right = aes::decrypt_payload(envelope, k1);
    const std::vector<std::uint8_t> wrong = aes::decrypt_payload(envelope, k2);

    img::Image wrong_image = img::Image::make(image.width, image.height, image.channels);
    wrong_image.samples = wrong;

    KeySensitivityReport report;
    report.digest_k1_hex = d1.hex();
    report.digest_k2_hex = d2.hex();
    report.npcr_wrong_key = npcr(image, wrong_image);
    report.uaci_wrong_key = uaci(image, wrong_image);
    report.correct_key_restores = right == image.samples;
    return report;
}

std::vector<TimingRow> timing_report(std::span<const int> sizes, const aes::AesKey& key,
                                     std::uint64_t image_seed) {
    std::vector<TimingRow> rows;
    if (sizes.empty()) return rows;

    Rng iv_rng(image_seed);
    for (int size : sizes) {
        const img::Image image = img::generate_test_image(size, img::TestImageKind::gradient, image_seed);
        const MetricsReport r = evaluate_image(image, key, aes::derive_iv(iv_rng));
        rows.push_back({r.pixel_size, r.encrypt_s, r.decrypt_s});
    }

    TimingRow avg{"Average", 0.0, 0.0};
    for (const auto& row : rows) {
        avg.encrypt_s += row.encrypt_s;
        avg.decrypt_s += row.decrypt_s;
    }
    avg.encrypt_s /= static_cast<double>(rows.size());
    avg.decrypt_s /= static_cast<double>(rows.size());
    rows.push_back(avg);
    return rows;
}

std::string timing_csv(std::span<const TimingRow> rows) {
    std::ostringstream out;
    out << "size,encrypt_s,decrypt_s\n";
    for (const auto& row : rows)
        out << row.label << ',' << row.encrypt_s << ',' << row.decrypt_s << '\n';
    return out.str();
}

}  // namespace qse::metrics
