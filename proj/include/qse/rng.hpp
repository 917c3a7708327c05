#pragma once

#include <cstdint>
#include <random>

namespace qse {

/// Deterministic random stream. Every sampling API in this library takes one
/// of these explicitly so that a run is reproducible bit-for-bit from its
/// seed. Draws avoid std::*_distribution, whose output is
/// implementation-defined; mt19937_64 itself is pinned by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t next_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    std::uint8_t next_byte() { return static_cast<std::uint8_t>(engine_() & 0xff); }

    bool next_bool() { return (engine_() & 1) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qse
