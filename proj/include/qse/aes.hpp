#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qse/rng.hpp"
#include "qse/sha256.hpp"

namespace qse::aes {

/// 256-bit cipher key (Nk = 8, Nr = 14). Taken whole from a SHA-256 digest.
struct AesKey {
    std::array<std::uint8_t, 32> bytes{};

    static AesKey from_digest(const sha256::HashDigest& digest);
};

using Block = std::array<std::uint8_t, 16>;

/// Cipher state: 4x4 bytes, column-major, s(r,c) = data[r + 4c].
using State = std::array<std::uint8_t, 16>;

/// Rijndael S-box, built at startup from the GF(2^8) multiplicative inverse
/// followed by the affine transform with constant 0x63.
const std::array<std::uint8_t, 256>& sbox();
const std::array<std::uint8_t, 256>& inv_sbox();

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b);

void sub_bytes(State& s);
void inv_sub_bytes(State& s);
void shift_rows(State& s);
void inv_shift_rows(State& s);
void mix_columns(State& s);
void inv_mix_columns(State& s);
void add_round_key(State& s, const Block& round_key);

struct RoundKeys {
    std::array<Block, 15> rk{};
};

/// AES-256 key schedule. Throws std::invalid_argument unless given 32 bytes.
RoundKeys key_expansion(std::span<const std::uint8_t> key);
RoundKeys key_expansion(const AesKey& key);

/// The 60 schedule words, big-endian, for vector checks.
std::array<std::uint32_t, 60> key_expansion_words(const AesKey& key);

Block encrypt_block(const Block& plaintext, const RoundKeys& keys);
Block decrypt_block(const Block& ciphertext, const RoundKeys& keys);

inline constexpr std::array<std::uint8_t, 4> kEnvelopeMagic = {'Q', 'S', 'E', '1'};
inline constexpr std::size_t kEnvelopeHeaderBytes = 4 + 16 + 8;

/// Framing for an encrypted payload: magic "QSE1", 16-byte IV, 64-bit
/// big-endian payload length, then ciphertext padded to a block multiple.
struct CipherEnvelope {
    std::array<std::uint8_t, 16> iv{};
    std::uint64_t payload_len = 0;
    std::vector<std::uint8_t> ciphertext;

    std::vector<std::uint8_t> serialize() const;

    /// Throws CryptoFormatError on bad magic or truncation.
    static CipherEnvelope parse(std::span<const std::uint8_t> bytes);
};

/// CBC encryption with zero padding; the true length travels in the
/// envelope. Decryption with any 32-byte key always succeeds mechanically —
/// a wrong key yields garbage rather than an error, which the
/// key-sensitivity experiment relies on.
CipherEnvelope encrypt_payload(std::span<const std::uint8_t> plaintext, const AesKey& key,
                               const std::array<std::uint8_t, 16>& iv);
std::vector<std::uint8_t> decrypt_payload(const CipherEnvelope& envelope, const AesKey& key);

/// IV derived from a seeded stream, for reproducible runs.
std::array<std::uint8_t, 16> derive_iv(Rng& rng);

/// IV from OS randomness (the default for fresh encryptions).
std::array<std::uint8_t, 16> os_random_iv();

}  // namespace qse::aes
