#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <sstream>
#include <vector>

#include "qse/aes.hpp"
#include "qse/image.hpp"
#include "qse/metrics.hpp"
#include "qse/rng.hpp"
#include "qse/sha256.hpp"

using namespace qse;
using namespace qse::metrics;

namespace {

img::Image complemented(const img::Image& image) {
    img::Image out = image;
    for (auto& s : out.samples) s = static_cast<std::uint8_t>(255 - s);
    return out;
}

}  // namespace

TEST_CASE("entropy endpoints") {
    const std::vector<std::uint8_t> constant(4096, 0x41);
    CHECK(shannon_entropy(constant) == 0.0);

    std::vector<std::uint8_t> uniform;
    for (int rep = 0; rep < 16; ++rep)
        for (int v = 0; v < 256; ++v) uniform.push_back(static_cast<std::uint8_t>(v));
    CHECK(shannon_entropy(uniform) == doctest::Approx(8.0).epsilon(1e-12));

    CHECK_THROWS_AS(shannon_entropy({}), std::invalid_argument);
}

TEST_CASE("entropy stays within [0, 8] on arbitrary data") {
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> data(1 + rng.next_index(5000));
        for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_index(1 + rng.next_index(256)));
        const double h = shannon_entropy(data);
        CHECK(h >= 0.0);
        CHECK(h <= 8.0);
    }
}

TEST_CASE("npcr endpoints, symmetry and shape checks") {
    const img::Image a = img::generate_test_image(64, img::TestImageKind::noise, 11);
    CHECK(npcr(a, a) == 0.0);
    CHECK(npcr(a, complemented(a)) == 100.0);

    const img::Image b = img::generate_test_image(64, img::TestImageKind::noise, 12);
    CHECK(npcr(a, b) == npcr(b, a));

    const img::Image small = img::generate_test_image(32, img::TestImageKind::noise, 11);
    CHECK_THROWS_AS(npcr(a, small), std::invalid_argument);

    const auto per_channel = npcr_per_channel(a, b);
    CHECK(per_channel.size() == 3);
    for (double v : per_channel) {
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
    }
}

TEST_CASE("uaci endpoints and symmetry") {
    const img::Image a = img::generate_test_image(64, img::TestImageKind::gradient, 13);
    CHECK(uaci(a, a) == 0.0);

    img::Image black = img::Image::make(64, 64, 3);
    img::Image white = img::Image::make(64, 64, 3);
    std::fill(white.samples.begin(), white.samples.end(), 255);
    CHECK(uaci(black, white) == doctest::Approx(100.0).epsilon(1e-12));

    const img::Image b = img::generate_test_image(64, img::TestImageKind::noise, 14);
    CHECK(uaci(a, b) == uaci(b, a));
    CHECK_THROWS_AS(uaci(a, img::Image::make(64, 64, 1)), std::invalid_argument);
}

TEST_CASE("histogram counts every sample once") {
    img::Image zeros = img::Image::make(16, 16, 3);
    const Histogram hz = histogram(zeros);
    for (int c = 0; c < 3; ++c) {
        CHECK(hz.counts[static_cast<std::size_t>(c)][0] == 256);
        std::uint64_t total = 0;
        for (auto count : hz.counts[static_cast<std::size_t>(c)]) total += count;
        CHECK(total == zeros.pixel_count());
    }

    const img::Image noisy = img::generate_test_image(64, img::TestImageKind::noise, 15);
    const Histogram hn = histogram(noisy);
    for (int c = 0; c < 3; ++c) {
        std::uint64_t total = 0;
        for (auto count : hn.counts[static_cast<std::size_t>(c)]) total += count;
        CHECK(total == noisy.pixel_count());
    }
}

TEST_CASE("uniform noise at 512x512 has a nearly flat histogram") {
    const img::Image noisy = img::generate_test_image(512, img::TestImageKind::noise, 16);
    const Histogram h = histogram(noisy);
    for (int c = 0; c < 3; ++c) {
        const auto& counts = h.counts[static_cast<std::size_t>(c)];
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(static_cast<double>(*hi) / static_cast<double>(*lo) < 1.5);
    }
}

TEST_CASE("histogram CSV layout") {
    const img::Image image = img::Image::make(4, 4, 1);
    const std::string csv = histogram_csv(histogram(image));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "channel,bin,count");
    std::getline(lines, line);
    CHECK(line == "0,0,16");
    int count = 1;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 256);
}

TEST_CASE("histogram render shape") {
    const img::Image image = img::generate_test_image(32, img::TestImageKind::noise, 17);
    const img::Image chart = render_histogram(histogram(image));
    CHECK(chart.width == 256);
    CHECK(chart.height == 300);  // 100 rows per channel
    CHECK(chart.channels == 1);
}

TEST_CASE("ciphertext_as_image reinterprets the leading cipher bytes") {
    const img::Image image = img::generate_test_image(32, img::TestImageKind::gradient, 18);
    const auto key = aes::AesKey::from_digest(sha256::derive_key("1010"));
    Rng rng(19);
    const auto env = aes::encrypt_payload(image.samples, key, aes::derive_iv(rng));

    const img::Image view = ciphertext_as_image(env, 32, 32, 3);
    CHECK(view.sample_count() == image.sample_count());
    for (std::size_t i = 0; i < 64; ++i) CHECK(view.samples[i] == env.ciphertext[i]);

    CHECK_THROWS_AS(ciphertext_as_image(env, 512, 512, 3), std::invalid_argument);
}

TEST_CASE("key sensitivity experiment reproduces the published digest pair") {
    const std::string k1 = "000010010110011110101011111010111011101011111010111";
    const img::Image image = img::generate_test_image(64, img::TestImageKind::gradient, 20);
    Rng rng(21);
    const auto report = key_sensitivity_experiment(image, k1, 0, aes::derive_iv(rng));

    CHECK(report.digest_k1_hex ==
          "8a49d097d696624218e1872935d9e3d2767bd9953d2e4a6b6946210966e5732c");
    CHECK(report.digest_k2_hex ==
          "200fa0c121fc9d2e2b7640445f05308ce671c68b29a1d2aae6311a392d468f5b");
    CHECK(report.npcr_wrong_key > 99.0);
    CHECK(report.uaci_wrong_key > 0.0);
    CHECK(report.uaci_wrong_key < 100.0);
    CHECK(report.correct_key_restores);

    CHECK_THROWS_AS(key_sensitivity_experiment(image, k1, k1.size(), aes::derive_iv(rng)),
                    std::invalid_argument);
}

TEST_CASE("evaluate_image gathers in-range metrics and a size label") {
    const auto key = aes::AesKey::from_digest(sha256::derive_key("0110"));
    const img::Image image = img::generate_test_image(64, img::TestImageKind::blocks, 22);
    Rng rng(23);
    const MetricsReport report = evaluate_image(image, key, aes::derive_iv(rng));

    CHECK(report.pixel_size == "64x64");
    CHECK(report.entropy_bits >= 0.0);
    CHECK(report.entropy_bits <= 8.0);
    CHECK(report.npcr_percent >= 0.0);
    CHECK(report.npcr_percent <= 100.0);
    CHECK(report.uaci_percent >= 0.0);
    CHECK(report.uaci_percent <= 100.0);
    CHECK(report.encrypt_s > 0.0);
    CHECK(report.decrypt_s > 0.0);
}

TEST_CASE("timing report shape") {
    const auto key = aes::AesKey::from_digest(sha256::derive_key("1100"));

    const std::vector<int> none;
    CHECK(timing_report(none, key, 1).empty());

    const std::vector<int> sizes = {32, 64};
    const auto rows = timing_report(sizes, key, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].label == "32x32");
    CHECK(rows[1].label == "64x64");
    CHECK(rows[2].label == "Average");
    CHECK(rows[2].encrypt_s ==
          doctest::Approx((rows[0].encrypt_s + rows[1].encrypt_s) / 2).epsilon(1e-9));
    for (const auto& row : rows) {
        CHECK(row.encrypt_s > 0.0);
        CHECK(row.decrypt_s > 0.0);
    }

    const std::string csv = timing_csv(rows);
    CHECK(csv.rfind("size,encrypt_s,decrypt_s\n", 0) == 0);
}
