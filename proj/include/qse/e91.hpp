#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qse/quantum.hpp"
#include "qse/rng.hpp"

namespace qse::e91 {

/// Alice measures along {Z, (X+Z)/sqrt2, X}; Bob along
/// {(X+Z)/sqrt2, X, (X-Z)/sqrt2}. The shared pairs a2/b1 and a3/b2 yield key
/// bits; the four unequal combinations a1/a3 x b1/b3 feed the CHSH statistic.
const std::array<quantum::BasisDirection, 3>& alice_bases();
const std::array<quantum::BasisDirection, 3>& bob_bases();

struct MeasurementRound {
    std::size_t index = 0;
    int alice_basis = 1;   // 1..3
    int bob_basis = 1;     // 1..3
    int alice_outcome = 0; // +-1
    int bob_outcome = 0;   // +-1
};

enum class Attacker { none, intercept_resend };

struct ChannelConfig {
    double depolarizing_p = 1.0;  // probability the pure entangled state survives
    Attacker eavesdropper = Attacker::none;
};

struct ProtocolResult {
    std::vector<MeasurementRound> rounds;
    std::string sifted_key;      // Alice's bits; equals Bob's on a noiseless channel
    double chsh_value = 0.0;     // NaN when some CHSH cell received no rounds
    bool secure = false;
    double elapsed_s = 0.0;
    double key_rate_bps = 0.0;
};

inline constexpr double kDefaultChshThreshold = 2.5;

/// Run the full protocol: per singlet both parties draw a basis uniformly at
/// random, measure, then the transcript is sifted and the CHSH statistic
/// evaluated. Deterministic given (n_singlets, channel, seed) apart from
/// elapsed_s. Throws std::invalid_argument for n_singlets == 0.
ProtocolResult run_protocol(std::size_t n_singlets, const ChannelConfig& channel,
                            std::uint64_t seed, double chsh_threshold = kDefaultChshThreshold);

struct SiftedKeys {
    std::string alice;
    std::string bob;
};

/// Keep rounds with matching effective observables — (a2,b1) and (a3,b2).
/// Alice maps outcome +1 -> '0'; Bob maps +1 -> '1', so anti-correlated
/// outcomes produce equal bits.
SiftedKeys sift(std::span<const MeasurementRound> rounds);

/// E = <a1 b1> - <a1 b3> + <a3 b1> + <a3 b3> over sample means of outcome
/// products. Throws InsufficientDataError naming the first empty basis pair.
double chsh_statistic(std::span<const MeasurementRound> rounds);

/// Secure iff |E| exceeds the threshold (strict). Threshold must lie in
/// (2, 2*sqrt(2)).
bool detect_eavesdropper(double chsh_value, double threshold = kDefaultChshThreshold);

/// Intercept-resend attack on the in-flight qubit: Eve measures Bob's qubit
/// in a random basis from {Z, X} and forwards the collapsed product state.
quantum::TwoQubitState intercept_resend_attack(const quantum::TwoQubitState& state, Rng& eve_rng);

struct ReportRow {
    std::size_t singlets = 0;
    std::size_t key_bits = 0;
    double time_s = 0.0;
    double rate_bps = 0.0;
    double chsh = 0.0;
    bool secure = false;
};

ReportRow key_generation_report(const ProtocolResult& result);

std::string report_csv_header();
std::string report_csv_row(const ReportRow& row);

}  // namespace qse::e91
