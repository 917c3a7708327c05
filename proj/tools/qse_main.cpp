#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qse/aes.hpp"
#include "qse/e91.hpp"
#include "qse/errors.hpp"
#include "qse/image.hpp"
#include "qse/metrics.hpp"
#include "qse/sha256.hpp"
#include "qse/stego.hpp"

namespace fs = std::filesystem;
using namespace qse;

namespace {

// Exit codes, one per failure class.
constexpr int kExitUsage = 2;
constexpr int kExitInsecure = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitFormat = 5;
constexpr int kExitCryptoFormat = 6;

/// Aborts a pipeline with a named stage and a dedicated exit code.
struct StageFailure {
    std::string stage;
    std::string reason;
    int exit_code;
};

// Demonstration key for the key-sensitivity report; its digest pair is a
// known-answer reference.
constexpr const char* kDefaultAnalysisKey =
    "000010010110011110101011111010111011101011111010111";

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_key_bits(const fs::path& path) {
    std::string bits;
    for (std::uint8_t b : read_file(path)) {
        const char c = static_cast<char>(b);
        if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
        bits.push_back(c);
    }
    return bits;
}

img::RasterFormat format_for(const img::Image& image) {
    return image.channels == 1 ? img::RasterFormat::pgm : img::RasterFormat::ppm;
}

img::TestImageKind parse_kind(const std::string& name) {
    if (name == "gradient") return img::TestImageKind::gradient;
    if (name == "noise") return img::TestImageKind::noise;
    if (name == "blocks") return img::TestImageKind::blocks;
    throw std::invalid_argument("kind must be gradient, noise or blocks");
}

struct KeygenConfig {
    std::size_t singlets = 500;
    std::uint64_t seed = 1;
    double depolarizing_p = 1.0;
    bool eve = false;
    double chsh_threshold = e91::kDefaultChshThreshold;
    bool force = false;
    std::string out = "e91.key";
    std::string csv;
};

int run_keygen(const KeygenConfig& cfg) {
    e91::ChannelConfig channel;
    channel.depolarizing_p = cfg.depolarizing_p;
    channel.eavesdropper = cfg.eve ? e91::Attacker::intercept_resend : e91::Attacker::none;

    const e91::ProtocolResult result =
        e91::run_protocol(cfg.singlets, channel, cfg.seed, cfg.chsh_threshold);
    const e91::ReportRow row = e91::key_generation_report(result);

    std::cout << "singlets:  " << row.singlets << "\n"
              << "key bits:  " << row.key_bits << "\n"
              << "chsh:      " << row.chsh << "\n"
              << "secure:    " << (row.secure ? "true" : "false") << "\n";
    if (!result.sifted_key.empty())
        std::cout << "sha256:    " << sha256::derive_key(result.sifted_key).hex() << "\n";
    std::cout << "time_s:    " << row.time_s << "\n"
              << "rate_bps:  " << row.rate_bps << "\n";

    if (!cfg.csv.empty())
        write_text(cfg.csv, e91::report_csv_header() + "\n" + e91::report_csv_row(row) + "\n");

    if (!result.secure && !cfg.force) {
        std::cerr << "channel not certified secure (chsh " << result.chsh_value
                  << ", threshold " << cfg.chsh_threshold
                  << "); refusing to write key material (--force overrides)\n";
        return kExitInsecure;
    }

    write_text(cfg.out, result.sifted_key + "\n");
    std::cout << "key written to " << cfg.out << "\n";
    return 0;
}

aes::AesKey key_from_options(const std::string& key_bits, const std::string& key_file) {
    std::string bits = key_bits;
    if (bits.empty() && !key_file.empty()) {
        bits = read_key_bits(key_file);
        if (bits.empty()) throw std::invalid_argument("key file " + key_file + " contains no bits");
    }
    if (bits.empty()) throw std::invalid_argument("provide --key-bits or --key-file");
    return aes::AesKey::from_digest(sha256::derive_key(bits));
}

std::array<std::uint8_t, 16> iv_from_option(const std::optional<std::uint64_t>& iv_seed) {
    if (iv_seed) {
        Rng rng(*iv_seed);
        return aes::derive_iv(rng);
    }
    return aes::os_random_iv();
}

struct AnalyzeConfig {
    std::string outdir;
    std::vector<int> sizes = {64, 128, 256, 512};
    std::uint64_t seed = 1;
    std::string kind = "gradient";
    std::string key_bits = kDefaultAnalysisKey;
    std::size_t flip_index = 0;
    std::uint64_t iv_seed = 42;
};

int run_analyze(const AnalyzeConfig& cfg) {
    const fs::path outdir(cfg.outdir);
    fs::create_directories(outdir);

    const img::TestImageKind kind = parse_kind(cfg.kind);
    const aes::AesKey key = aes::AesKey::from_digest(sha256::derive_key(cfg.key_bits));
    Rng iv_rng(cfg.iv_seed);

    std::ostringstream entropy_csv;
    entropy_csv << "size,entropy_cipher\n";
    std::ostringstream diff_csv;
    diff_csv << "size,npcr_percent,uaci_percent";
    for (int c = 0; c < 3; ++c) diff_csv << ",npcr_channel" << c;
    diff_csv << "\n";
    std::vector<metrics::TimingRow> timing;

    for (int size : cfg.sizes) {
        const img::Image original = img::generate_test_image(size, kind, cfg.seed);
        const auto iv = aes::derive_iv(iv_rng);
        const metrics::MetricsReport row = metrics::evaluate_image(original, key, iv);
        const img::Image cipher_view = metrics::ciphertext_as_image(
            aes::encrypt_payload(original.samples, key, iv), original.width, original.height,
            original.channels);

        entropy_csv << size << ',' << row.entropy_bits << '\n';
        diff_csv << size << ',' << row.npcr_percent << ',' << row.uaci_percent;
        for (double v : metrics::npcr_per_channel(original, cipher_view)) diff_csv << ',' << v;
        diff_csv << '\n';
        timing.push_back({row.pixel_size, row.encrypt_s, row.decrypt_s});

        const std::string tag = std::to_string(size);
        write_text(outdir / ("histogram_" + tag + "_original.csv"),
                   metrics::histogram_csv(metrics::histogram(original)));
        write_text(outdir / ("histogram_" + tag + "_encrypted.csv"),
                   metrics::histogram_csv(metrics::histogram(cipher_view)));
        img::write_image(metrics::render_histogram(metrics::histogram(original)),
                         outdir / ("histogram_" + tag + "_original.pgm"), img::RasterFormat::pgm);
        img::write_image(metrics::render_histogram(metrics::histogram(cipher_view)),
                         outdir / ("histogram_" + tag + "_encrypted.pgm"), img::RasterFormat::pgm);
    }

    if (!timing.empty()) {
        metrics::TimingRow avg{"Average", 0.0, 0.0};
        for (const auto& row : timing) {
            avg.encrypt_s += row.encrypt_s;
            avg.decrypt_s += row.decrypt_s;
        }
        avg.encrypt_s /= static_cast<double>(timing.size());
        avg.decrypt_s /= static_cast<double>(timing.size());
        timing.push_back(avg);
    }

    write_text(outdir / "entropy.csv", entropy_csv.str());
    write_text(outdir / "diff.csv", diff_csv.str());
    write_text(outdir / "timing.csv", metrics::timing_csv(timing));

    // Key sensitivity on the largest requested size.
    const int ks_size = cfg.sizes.empty() ? 64 : *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
    const img::Image subject = img::generate_test_image(ks_size, kind, cfg.seed);
    const auto ks =
        metrics::key_sensitivity_experiment(subject, cfg.key_bits, cfg.flip_index, aes::derive_iv(iv_rng));
    std::ostringstream ks_csv;
    ks_csv << "digest_k1,digest_k2,npcr_wrong_key,uaci_wrong_key,correct_key_restores\n"
           << ks.digest_k1_hex << ',' << ks.digest_k2_hex << ',' << ks.npcr_wrong_key << ','
           << ks.uaci_wrong_key << ',' << (ks.correct_key_restores ? "true" : "false") << '\n';
    write_text(outdir / "key_sensitivity.csv", ks_csv.str());

    std::cout << "analysis written to " << outdir.string() << "\n";
    return 0;
}

struct DemoConfig {
    std::string outdir = "demo";
    std::string cover;
    std::string secret;
    std::size_t singlets = 500;
    std::uint64_t seed = 7;
    std::optional<std::uint64_t> iv_seed;
    bool eve = false;
    double depolarizing_p = 1.0;
    double chsh_threshold = e91::kDefaultChshThreshold;
    int lsb_k = 2;
};

int run_demo(const DemoConfig& cfg) {
    const fs::path outdir(cfg.outdir);
    fs::create_directories(outdir);
    std::ostringstream manifest;
    const auto record = [&](const std::string& stage, const fs::path& path) {
        manifest << stage << "  " << path.filename().string() << "  "
                 << sha256::digest(std::span<const std::uint8_t>(read_file(path))).hex() << "\n";
    };

    // Inputs: supplied images, or deterministic generated ones.
    img::Image cover, secret;
    fs::path cover_path = outdir / "cover.ppm";
    fs::path secret_path = outdir / "secret.ppm";
    if (!cfg.cover.empty()) {
        cover = img::read_image(cfg.cover);
        cover_path = cfg.cover;
    } else {
        cover = img::generate_test_image(256, img::TestImageKind::gradient, cfg.seed);
        img::write_image(cover, cover_path, format_for(cover));
    }
    if (!cfg.secret.empty()) {
        secret = img::read_image(cfg.secret);
        secret_path = cfg.secret;
    } else {
        secret = img::generate_test_image(120, img::TestImageKind::blocks, cfg.seed + 1);
        img::write_image(secret, secret_path, format_for(secret));
    }
    record("input-cover", cover_path);
    record("input-secret", secret_path);

    // Stage 1: keygen over the simulated quantum channel.
    e91::ChannelConfig channel;
    channel.depolarizing_p = cfg.depolarizing_p;
    channel.eavesdropper = cfg.eve ? e91::Attacker::intercept_resend : e91::Attacker::none;
    const e91::ProtocolResult protocol =
        e91::run_protocol(cfg.singlets, channel, cfg.seed, cfg.chsh_threshold);
    if (!protocol.secure)
        throw StageFailure{"keygen", "channel not certified secure (chsh " +
                                         std::to_string(protocol.chsh_value) + ")",
                           kExitInsecure};
    if (protocol.sifted_key.empty())
        throw StageFailure{"keygen", "empty sifted key", kExitInsecure};
    const fs::path key_path = outdir / "e91.key";
    write_text(key_path, protocol.sifted_key + "\n");
    record("keygen", key_path);

    // Stage 2: hide the secret in the cover.
    img::Image stego;
    try {
        stego = stego::embed(cover, secret, cfg.lsb_k);
    } catch (const CapacityError& e) {
        throw StageFailure{"embed", e.what(), kExitCapacity};
    }
    const fs::path stego_path = outdir / "stego.ppm";
    img::write_image(stego, stego_path, format_for(stego));
    record("embed", stego_path);

    // Stage 3: encrypt the stego raster with the hashed key.
    const aes::AesKey key = aes::AesKey::from_digest(sha256::derive_key(protocol.sifted_key));
    Rng iv_rng(cfg.iv_seed.value_or(cfg.seed));
    const auto iv = aes::derive_iv(iv_rng);
    const auto stego_bytes = img::serialize(stego, format_for(stego));
    const aes::CipherEnvelope envelope = aes::encrypt_payload(stego_bytes, key, iv);
    const fs::path envelope_path = outdir / "payload.qse";
    write_file(envelope_path, envelope.serialize());
    record("encrypt", envelope_path);

    // Stage 4: the classical channel is the filesystem; decrypt what landed.
    const aes::CipherEnvelope received = aes::CipherEnvelope::parse(read_file(envelope_path));
    const auto decrypted_bytes = aes::decrypt_payload(received, key);
    if (decrypted_bytes != stego_bytes)
        throw StageFailure{"decrypt", "round trip mismatch", kExitCryptoFormat};
    const fs::path decrypted_path = outdir / "decrypted.ppm";
    write_file(decrypted_path, decrypted_bytes);
    record("decrypt", decrypted_path);

    // Stage 5: recover the hidden secret.
    const img::Image revealed = stego::extract(img::read_image(decrypted_path));
    const fs::path revealed_path = outdir / "revealed.ppm";
    img::write_image(revealed, revealed_path, format_for(revealed));
    record("extract", revealed_path);

    if (!revealed.same_shape(secret) || revealed.samples != secret.samples)
        throw StageFailure{"verify", "revealed secret differs from original", 1};
    manifest << "verify  ok  secret-recovered-byte-exact\n";

    write_text(outdir / "manifest.txt", manifest.str());
    std::cout << "demo complete; manifest written to " << (outdir / "manifest.txt").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"E91 key exchange, SHA-256 key derivation, AES-256 image encryption and LSB steganography"};
    app.require_subcommand(1);

    // keygen
    KeygenConfig keygen_cfg;
    auto* keygen = app.add_subcommand("keygen", "Run the E91 protocol and derive a key");
    keygen->add_option("--singlets", keygen_cfg.singlets, "Entangled pairs to use");
    keygen->add_option("--seed", keygen_cfg.seed, "Random seed");
    keygen->add_option("--depolarizing-p", keygen_cfg.depolarizing_p, "Channel purity p in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    keygen->add_flag("--eve", keygen_cfg.eve, "Simulate an intercept-resend eavesdropper");
    keygen->add_option("--chsh-threshold", keygen_cfg.chsh_threshold, "Security threshold in (2, 2*sqrt(2))");
    keygen->add_flag("--force", keygen_cfg.force, "Write key material even when insecure");
    keygen->add_option("--out", keygen_cfg.out, "Key file to write");
    keygen->add_option("--csv", keygen_cfg.csv, "Optional report CSV path");

    // hash-key
    std::string hash_bits, hash_file;
    auto* hash_key = app.add_subcommand("hash-key", "SHA-256 digest of a '0'/'1' key string");
    hash_key->add_option("--bits", hash_bits, "Key bits");
    hash_key->add_option("--key-file", hash_file, "File containing key bits");

    // gen-image
    int gen_size = 256;
    std::string gen_kind = "gradient", gen_out;
    std::uint64_t gen_seed = 1;
    auto* gen_image = app.add_subcommand("gen-image", "Write a deterministic test image");
    gen_image->add_option("--size", gen_size, "Square size in pixels")->check(CLI::PositiveNumber);
    gen_image->add_option("--kind", gen_kind, "gradient|noise|blocks");
    gen_image->add_option("--seed", gen_seed, "Random seed");
    gen_image->add_option("--out", gen_out, "Output .ppm path")->required();

    // embed
    std::string embed_cover, embed_secret, embed_out;
    int embed_k = 2;
    auto* embed = app.add_subcommand("embed", "Hide a secret image inside a cover image");
    embed->add_option("--cover", embed_cover, "Cover image (P5/P6)")->required();
    embed->add_option("--secret", embed_secret, "Secret image (P5/P6)")->required();
    embed->add_option("--out", embed_out, "Stego image path")->required();
    embed->add_option("--lsb-k", embed_k, "Bits per channel sample (1, 2 or 4)");

    // extract
    std::string extract_in, extract_out;
    auto* extract = app.add_subcommand("extract", "Recover a hidden secret image");
    extract->add_option("--in", extract_in, "Stego image")->required();
    extract->add_option("--out", extract_out, "Recovered secret path")->required();

    // encrypt
    std::string enc_in, enc_out, enc_key_bits, enc_key_file;
    std::optional<std::uint64_t> enc_iv_seed;
    auto* encrypt = app.add_subcommand("encrypt", "AES-256-CBC encrypt an image into a .qse envelope");
    encrypt->add_option("--in", enc_in, "Image to encrypt")->required();
    encrypt->add_option("--out", enc_out, "Envelope path (.qse)")->required();
    encrypt->add_option("--key-bits", enc_key_bits, "Key as a '0'/'1' string");
    encrypt->add_option("--key-file", enc_key_file, "Key bits file");
    encrypt->add_option("--iv-seed", enc_iv_seed, "Derive the IV deterministically from this seed");

    // decrypt
    std::string dec_in, dec_out, dec_key_bits, dec_key_file;
    auto* decrypt = app.add_subcommand("decrypt", "Decrypt a .qse envelope back to an image");
    decrypt->add_option("--in", dec_in, "Envelope path")->required();
    decrypt->add_option("--out", dec_out, "Output image path")->required();
    decrypt->add_option("--key-bits", dec_key_bits, "Key as a '0'/'1' string");
    decrypt->add_option("--key-file", dec_key_file, "Key bits file");

    // analyze
    AnalyzeConfig analyze_cfg;
    auto* analyze = app.add_subcommand("analyze", "Entropy, NPCR/UACI, histogram, timing and key-sensitivity reports");
    analyze->add_option("--outdir", analyze_cfg.outdir, "Report directory")->required();
    analyze->add_option("--sizes", analyze_cfg.sizes, "Image sizes")->delimiter(',');
    analyze->add_option("--seed", analyze_cfg.seed, "Test image seed");
    analyze->add_option("--kind", analyze_cfg.kind, "gradient|noise|blocks");
    analyze->add_option("--key-bits", analyze_cfg.key_bits, "Key bits for the cipher");
    analyze->add_option("--flip-index", analyze_cfg.flip_index, "Bit flipped for key sensitivity");
    analyze->add_option("--iv-seed", analyze_cfg.iv_seed, "IV derivation seed");

    // demo
    DemoConfig demo_cfg;
    auto* demo = app.add_subcommand("demo", "Full pipeline: keygen, embed, encrypt, decrypt, extract, verify");
    demo->add_option("--outdir", demo_cfg.outdir, "Artifact directory");
    demo->add_option("--cover", demo_cfg.cover, "Cover image (generated when omitted)");
    demo->add_option("--secret", demo_cfg.secret, "Secret image (generated when omitted)");
    demo->add_option("--singlets", demo_cfg.singlets, "Entangled pairs for keygen");
    demo->add_option("--seed", demo_cfg.seed, "Random seed");
    demo->add_option("--iv-seed", demo_cfg.iv_seed, "IV seed (defaults to --seed)");
    demo->add_flag("--eve", demo_cfg.eve, "Simulate an eavesdropper");
    demo->add_option("--depolarizing-p", demo_cfg.depolarizing_p, "Channel purity p in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    demo->add_option("--chsh-threshold", demo_cfg.chsh_threshold, "Security threshold");
    demo->add_option("--lsb-k", demo_cfg.lsb_k, "Bits per channel sample");

    try {
        app.parse(argc, argv);

        if (keygen->parsed()) return run_keygen(keygen_cfg);

        if (hash_key->parsed()) {
            std::string bits = hash_bits;
            if (bits.empty() && !hash_file.empty()) bits = read_key_bits(hash_file);
            std::cout << sha256::derive_key(bits).hex() << "\n";
            return 0;
        }

        if (gen_image->parsed()) {
            const img::Image image = img::generate_test_image(gen_size, parse_kind(gen_kind), gen_seed);
            img::write_image(image, gen_out, format_for(image));
            return 0;
        }

        if (embed->parsed()) {
            const img::Image cover = img::read_image(embed_cover);
            const img::Image secret = img::read_image(embed_secret);
            const img::Image stego = stego::embed(cover, secret, embed_k);
            img::write_image(stego, embed_out, format_for(stego));
            std::cout << "embedded " << secret.sample_count() << " bytes at k=" << embed_k << "\n";
            return 0;
        }

        if (extract->parsed()) {
            const img::Image secret = stego::extract(img::read_image(extract_in));
            img::write_image(secret, extract_out, format_for(secret));
            std::cout << "recovered " << secret.width << "x" << secret.height << "x"
                      << secret.channels << " secret\n";
            return 0;
        }

        if (encrypt->parsed()) {
            const img::Image image = img::read_image(enc_in);
            const aes::AesKey key = key_from_options(enc_key_bits, enc_key_file);
            const auto payload = img::serialize(image, format_for(image));
            const aes::CipherEnvelope envelope =
                aes::encrypt_payload(payload, key, iv_from_option(enc_iv_seed));
            write_file(enc_out, envelope.serialize());
            std::cout << "wrote " << enc_out << " (" << envelope.ciphertext.size()
                      << " ciphertext bytes)\n";
            return 0;
        }

        if (decrypt->parsed()) {
            const aes::CipherEnvelope envelope = aes::CipherEnvelope::parse(read_file(dec_in));
            const aes::AesKey key = key_from_options(dec_key_bits, dec_key_file);
            const auto payload = aes::decrypt_payload(envelope, key);
            write_file(dec_out, payload);  // a wrong key still yields writable bytes
            std::cout << "wrote " << dec_out << " (" << payload.size() << " bytes)\n";
            return 0;
        }

        if (analyze->parsed()) return run_analyze(analyze_cfg);
        if (demo->parsed()) return run_demo(demo_cfg);

        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const StageFailure& f) {
        std::cerr << "stage '" << f.stage << "' failed: " << f.reason << "\n";
        return f.exit_code;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const CryptoFormatError& e) {
        std::cerr << "envelope error: " << e.what() << "\n";
        return kExitCryptoFormat;
    } catch (const FormatError& e) {
        std::cerr << "image format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
