#include "qse/aes.hpp"

#include <random>
#include <stdexcept>

#include "qse/errors.hpp"

namespace qse::aes {

namespace {

constexpr int kNb = 4;
constexpr int kNk = 8;
constexpr int kNr = 14;

std::uint8_t xtime(std::uint8_t a) {
    return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0x00));
}

struct SboxTables {
    std::array<std::uint8_t, 256> fwd{};
    std::array<std::uint8_t, 256> inv{};
    // mul_by[c][x] = c * x in GF(2^8), for the MixColumns coefficients.
    std::array<std::array<std::uint8_t, 256>, 16> mul_by{};

    SboxTables() {
        for (int c = 0; c < 16; ++c)
            for (int x = 0; x < 256; ++x)
                mul_by[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)] =
                    gf_mul(static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(x));
        // Multiplicative inverses in GF(2^8) via exhaustive products;
        // {00} maps to itself.
        std::array<std::uint8_t, 256> inverse{};
        for (int a = 1; a < 256; ++a) {
            for (int b = 1; b < 256; ++b) {
                if (gf_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) == 1) {
                    inverse[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(b);
                    break;
                }
            }
        }
        for (int x = 0; x < 256; ++x) {
            const std::uint8_t b = inverse[static_cast<std::size_t>(x)];
            std::uint8_t y = 0;
            for (int i = 0; i < 8; ++i) {
                const int bit = ((b >> i) ^ (b >> ((i + 4) % 8)) ^ (b >> ((i + 5) % 8)) ^
                                 (b >> ((i + 6) % 8)) ^ (b >> ((i + 7) % 8)) ^ (0x63 >> i)) &
                                1;
                y = static_cast<std::uint8_t>(y | (bit << i));
            }
            fwd[static_cast<std::size_t>(x)] = y;
            inv[y] = static_cast<std::uint8_t>(x);
        }
    }
};

const SboxTables& tables() {
    static const SboxTables t;
    return t;
}

constexpr int state_index(int row, int col) { return row + 4 * col; }

void mix_single_column(const SboxTables& t, State& s, int c, const std::array<std::uint8_t, 4>& coeff) {
    const std::uint8_t a0 = s[static_cast<std::size_t>(state_index(0, c))];
    const std::uint8_t a1 = s[static_cast<std::size_t>(state_index(1, c))];
    const std::uint8_t a2 = s[static_cast<std::size_t>(state_index(2, c))];
    const std::uint8_t a3 = s[static_cast<std::size_t>(state_index(3, c))];
    for (int r = 0; r < 4; ++r) {
        s[static_cast<std::size_t>(state_index(r, c))] = static_cast<std::uint8_t>(
            t.mul_by[coeff[static_cast<std::size_t>((4 - r) % 4)]][a0] ^
            t.mul_by[coeff[static_cast<std::size_t>((5 - r) % 4)]][a1] ^
            t.mul_by[coeff[static_cast<std::size_t>((6 - r) % 4)]][a2] ^
            t.mul_by[coeff[static_cast<std::size_t>((7 - r) % 4)]][a3]);
    }
}

void write_be64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

Block xor_blocks(const Block& a, const Block& b) {
    Block out;
    for (std::size_t i = 0; i < 16; ++i) out[i] = a[i] ^ b[i];
    return out;
}

}  // namespace

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t result = 0;
    while (b) {
        if (b & 1) result ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return result;
}

const std::array<std::uint8_t, 256>& sbox() { return tables().fwd; }
const std::array<std::uint8_t, 256>& inv_sbox() { return tables().inv; }

AesKey AesKey::from_digest(const sha256::HashDigest& digest) { return AesKey{digest.bytes()}; }

void sub_bytes(State& s) {
    for (auto& b : s) b = tables().fwd[b];
}

void inv_sub_bytes(State& s) {
    for (auto& b : s) b = tables().inv[b];
}

void shift_rows(State& s) {
    // Row r rotates left by r; row 0 is untouched.
    for (int r = 1; r < 4; ++r) {
        std::array<std::uint8_t, 4> row;
        for (int c = 0; c < 4; ++c)
            row[static_cast<std::size_t>(c)] = s[static_cast<std::size_t>(state_index(r, (c + r) % 4))];
        for (int c = 0; c < 4; ++c)
            s[static_cast<std::size_t>(state_index(r, c))] = row[static_cast<std::size_t>(c)];
    }
}

void inv_shift_rows(State& s) {
    for (int r = 1; r < 4; ++r) {
        std::array<std::uint8_t, 4> row;
        for (int c = 0; c < 4; ++c)
            row[static_cast<std::size_t>((c + r) % 4)] = s[static_cast<std::size_t>(state_index(r, c))];
        for (int c = 0; c < 4; ++c)
            s[static_cast<std::size_t>(state_index(r, c))] = row[static_cast<std::size_t>(c)];
    }
}

void mix_columns(State& s) {
    for (int c = 0; c < 4; ++c) mix_single_column(tables(), s, c, {0x02, 0x03, 0x01, 0x01});
}

void inv_mix_columns(State& s) {
    for (int c = 0; c < 4; ++c) mix_single_column(tables(), s, c, {0x0e, 0x0b, 0x0d, 0x09});
}

void add_round_key(State& s, const Block& round_key) {
    for (std::size_t i = 0; i < 16; ++i) s[i] ^= round_key[i];
}

RoundKeys key_expansion(std::span<const std::uint8_t> key) {
    if (key.size() != 32) throw std::invalid_argument("AES key must be exactly 32 bytes");

    std::array<std::array<std::uint8_t, 4>, kNb *(kNr + 1)> w{};
    for (int i = 0; i < kNk; ++i)
        for (int j = 0; j < 4; ++j)
            w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                key[static_cast<std::size_t>(4 * i + j)];

    std::uint8_t rcon = 0x01;
    for (int i = kNk; i < kNb * (kNr + 1); ++i) {
        std::array<std::uint8_t, 4> temp = w[static_cast<std::size_t>(i - 1)];
        if (i % kNk == 0) {
            // RotWord, SubWord, Rcon
            temp = {temp[1], temp[2], temp[3], temp[0]};
            for (auto& b : temp) b = tables().fwd[b];
            temp[0] ^= rcon;
            rcon = xtime(rcon);
        } else if (i % kNk == 4) {
            for (auto& b : temp) b = tables().fwd[b];
        }
        for (int j = 0; j < 4; ++j)
            w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                w[static_cast<std::size_t>(i - kNk)][static_cast<std::size_t>(j)] ^
                temp[static_cast<std::size_t>(j)];
    }

    RoundKeys keys;
    for (int round = 0; round <= kNr; ++round)
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < 4; ++j)
                keys.rk[static_cast<std::size_t>(round)][static_cast<std::size_t>(4 * c + j)] =
                    w[static_cast<std::size_t>(4 * round + c)][static_cast<std::size_t>(j)];
    return keys;
}

RoundKeys key_expansion(const AesKey& key) { return key_expansion(std::span(key.bytes)); }

std::array<std::uint32_t, 60> key_expansion_words(const AesKey& key) {
    const RoundKeys keys = key_expansion(key);
    std::array<std::uint32_t, 60> words{};
    for (std::size_t i = 0; i < 60; ++i) {
        const auto& rk = keys.rk[i / 4];
        const std::size_t off = (i % 4) * 4;
        words[i] = (static_cast<std::uint32_t>(rk[off]) << 24) |
                   (static_cast<std::uint32_t>(rk[off + 1]) << 16) |
                   (static_cast<std::uint32_t>(rk[off + 2]) << 8) |
                   static_cast<std::uint32_t>(rk[off + 3]);
    }
    return words;
}

Block encrypt_block(const Block& plaintext, const RoundKeys& keys) {
    // The FIPS state maps input byte i to s(i mod 4, i div 4), which is the
    // identity under our column-major layout.
    State s = plaintext;
    add_round_key(s, keys.rk[0]);
    for (int round = 1; round < kNr; ++round) {
        sub_bytes(s);
        shift_rows(s);
        mix_columns(s);
        add_round_key(s, keys.rk[static_cast<std::size_t>(round)]);
    }
    sub_bytes(s);
    shift_rows(s);
    add_round_key(s, keys.rk[kNr]);
    return s;
}

Block decrypt_block(const Block& ciphertext, const RoundKeys& keys) {
    State s = ciphertext;
    add_round_key(s, keys.rk[kNr]);
    inv_shift_rows(s);
    inv_sub_bytes(s);
    for (int round = kNr - 1; round >= 1; --round) {
        add_round_key(s, keys.rk[static_cast<std::size_t>(round)]);
        inv_mix_columns(s);
        inv_shift_rows(s);
        inv_sub_bytes(s);
    }
    add_round_key(s, keys.rk[0]);
    return s;
}

std::vector<std::uint8_t> CipherEnvelope::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kEnvelopeHeaderBytes + ciphertext.size());
    out.insert(out.end(), kEnvelopeMagic.begin(), kEnvelopeMagic.end());
    out.insert(out.end(), iv.begin(), iv.end());
    write_be64(out, payload_len);
    out.insert(out.end(), ciphertext.begin(), ciphertext.end());
    return out;
}

CipherEnvelope CipherEnvelope::parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kEnvelopeHeaderBytes) throw CryptoFormatError("envelope truncated");
    for (std::size_t i = 0; i < 4; ++i)
        if (bytes[i] != kEnvelopeMagic[i]) throw CryptoFormatError("bad envelope magic");

    CipherEnvelope env;
    std::copy(bytes.begin() + 4, bytes.begin() + 20, env.iv.begin());
    env.payload_len = 0;
    for (std::size_t i = 20; i < 28; ++i) env.payload_len = (env.payload_len << 8) | bytes[i];

    const std::uint64_t expected = (env.payload_len + 15) / 16 * 16;
    if (bytes.size() - kEnvelopeHeaderBytes != expected)
        throw CryptoFormatError("envelope ciphertext length mismatch");
    env.ciphertext.assign(bytes.begin() + kEnvelopeHeaderBytes, bytes.end());
    return env;
}

CipherEnvelope encrypt_payload(std::span<const std::uint8_t> plaintext, const AesKey& key,
                               const std::array<std::uint8_t, 16>& iv) {
    const RoundKeys keys = key_expansion(key);

    CipherEnvelope env;
    env.iv = iv;
    env.payload_len = plaintext.size();
    const std::size_t padded = (plaintext.size() + 15) / 16 * 16;
    env.ciphertext.reserve(padded);

    Block chain = iv;
    for (std::size_t off = 0; off < padded; off += 16) {
        Block block{};
        const std::size_t n = std::min<std::size_t>(16, plaintext.size() > off ? plaintext.size() - off : 0);
        for (std::size_t i = 0; i < n; ++i) block[i] = plaintext[off + i];
        chain = encrypt_block(xor_blocks(block, chain), keys);
        env.ciphertext.insert(env.ciphertext.end(), chain.begin(), chain.end());
    }
    return env;
}

std::vector<std::uint8_t> decrypt_payload(const CipherEnvelope& envelope, const AesKey& key) {
    if (envelope.ciphertext.size() % 16 != 0 ||
        envelope.ciphertext.size() < (envelope.payload_len + 15) / 16 * 16)
        throw CryptoFormatError("envelope ciphertext length mismatch");

    const RoundKeys keys = key_expansion(key);
    std::vector<std::uint8_t> plain;
    plain.reserve(envelope.ciphertext.size());

    Block chain = envelope.iv;
    for (std::size_t off = 0; off < envelope.ciphertext.size(); off += 16) {
        Block block;
        std::copy_n(envelope.ciphertext.begin() + static_cast<std::ptrdiff_t>(off), 16, block.begin());
        const Block decrypted = xor_blocks(decrypt_block(block, keys), chain);
        plain.insert(plain.end(), decrypted.begin(), decrypted.end());
        chain = block;
    }
    plain.resize(envelope.payload_len);
    return plain;
}

std::array<std::uint8_t, 16> derive_iv(Rng& rng) {
    std::array<std::uint8_t, 16> iv{};
    for (auto& b : iv) b = rng.next_byte();
    return iv;
}

std::array<std::uint8_t, 16> os_random_iv() {
    std::random_device rd;
    std::array<std::uint8_t, 16> iv{};
    for (auto& b : iv) b = static_cast<std::uint8_t>(rd());
    return iv;
}

}  // namespace qse::aes
