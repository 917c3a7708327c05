#include "qse/e91.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qse/errors.hpp"

namespace qse::e91 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxChsh = 2.0 * std::numbers::sqrt2;

bool is_key_pair(int alice_basis, int bob_basis) {
    return (alice_basis == 2 && bob_basis == 1) || (alice_basis == 3 && bob_basis == 2);
}

}  // namespace

const std::array<quantum::BasisDirection, 3>& alice_bases() {
    static const std::array<quantum::BasisDirection, 3> bases = {
        quantum::BasisDirection(0.0),
        quantum::BasisDirection(kPi / 4),
        quantum::BasisDirection(kPi / 2),
    };
    return bases;
}

const std::array<quantum::BasisDirection, 3>& bob_bases() {
    static const std::array<quantum::BasisDirection, 3> bases = {
        quantum::BasisDirection(kPi / 4),
        quantum::BasisDirection(kPi / 2),
        quantum::BasisDirection(3 * kPi / 4),
    };
    return bases;
}

ProtocolResult run_protocol(std::size_t n_singlets, const ChannelConfig& channel,
                            std::uint64_t seed, double chsh_threshold) {
    if (n_singlets == 0) throw std::invalid_argument("n_singlets must be at least 1");
    if (!(channel.depolarizing_p >= 0.0 && channel.depolarizing_p <= 1.0))
        throw std::invalid_argument("depolarizing_p must be in [0,1]");

    const auto& alice = alice_bases();
    const auto& bob = bob_bases();
    const quantum::TwoQubitState singlet = quantum::prepare_singlet();
    const bool noisy = channel.depolarizing_p < 1.0;
    const bool eve = channel.eavesdropper == Attacker::intercept_resend;

    // The undisturbed noisy channel state is round-independent.
    const quantum::DensityMatrix channel_rho =
        noisy ? quantum::depolarize(singlet, channel.depolarizing_p) : quantum::DensityMatrix{};

    Rng rng(seed);
    ProtocolResult result;
    result.rounds.reserve(n_singlets);

    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < n_singlets; ++i) {
        const int a_idx = static_cast<int>(rng.next_index(3));
        const int b_idx = static_cast<int>(rng.next_index(3));

        quantum::PairOutcome outcome{};
        if (eve) {
            const quantum::TwoQubitState forwarded = intercept_resend_attack(singlet, rng);
            if (noisy) {
                outcome = quantum::measure_pair(quantum::depolarize(forwarded, channel.depolarizing_p),
                                                alice[static_cast<std::size_t>(a_idx)],
                                                bob[static_cast<std::size_t>(b_idx)], rng);
            } else {
                outcome = quantum::measure_pair(forwarded, alice[static_cast<std::size_t>(a_idx)],
                                                bob[static_cast<std::size_t>(b_idx)], rng);
            }
        } else if (noisy) {
            outcome = quantum::measure_pair(channel_rho, alice[static_cast<std::size_t>(a_idx)],
                                            bob[static_cast<std::size_t>(b_idx)], rng);
        } else {
            outcome = quantum::measure_pair(singlet, alice[static_cast<std::size_t>(a_idx)],
                                            bob[static_cast<std::size_t>(b_idx)], rng);
        }

        result.rounds.push_back({i, a_idx + 1, b_idx + 1, outcome.a, outcome.b});
    }

    result.sifted_key = sift(result.rounds).alice;
    try {
        result.chsh_value = chsh_statistic(result.rounds);
        result.secure = detect_eavesdropper(result.chsh_value, chsh_threshold);
    } catch (const InsufficientDataError&) {
        // Too few rounds to populate every CHSH cell: not certifiable.
        result.chsh_value = std::numeric_limits<double>::quiet_NaN();
        result.secure = false;
    }
    const auto t1 = std::chrono::steady_clock::now();

    result.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
    result.key_rate_bps =
        result.sifted_key.empty() ? 0.0 : static_cast<double>(result.sifted_key.size()) / result.elapsed_s;
    return result;
}

SiftedKeys sift(std::span<const MeasurementRound> rounds) {
    SiftedKeys keys;
    for (const auto& r : rounds) {
        if (!is_key_pair(r.alice_basis, r.bob_basis)) continue;
        keys.alice.push_back(r.alice_outcome == +1 ? '0' : '1');
        keys.bob.push_back(r.bob_outcome == +1 ? '1' : '0');
    }
    return keys;
}

double chsh_statistic(std::span<const MeasurementRound> rounds) {
    // Cells indexed by (alice in {1,3}, bob in {1,3}).
    double sums[2][2] = {};
    std::size_t counts[2][2] = {};
    for (const auto& r : rounds) {
        if ((r.alice_basis != 1 && r.alice_basis != 3) || (r.bob_basis != 1 && r.bob_basis != 3))
            continue;
        const int ai = r.alice_basis == 1 ? 0 : 1;
        const int bi = r.bob_basis == 1 ? 0 : 1;
        sums[ai][bi] += r.alice_outcome * r.bob_outcome;
        counts[ai][bi] += 1;
    }
    for (int ai = 0; ai < 2; ++ai) {
        for (int bi = 0; bi < 2; ++bi) {
            if (counts[ai][bi] == 0) {
                std::ostringstream msg;
                msg << "no rounds for basis pair (a" << (ai == 0 ? 1 : 3) << ",b"
                    << (bi == 0 ? 1 : 3) << ")";
                throw InsufficientDataError(msg.str());
            }
        }
    }
    const auto mean = [&](int ai, int bi) { return sums[ai][bi] / static_cast<double>(counts[ai][bi]); };
    return mean(0, 0) - mean(0, 1) + mean(1, 0) + mean(1, 1);
}

bool detect_eavesdropper(double chsh_value, double threshold) {
    if (!(threshold > 2.0 && threshold < kMaxChsh))
        throw std::invalid_argument("CHSH threshold must lie in (2, 2*sqrt(2))");
    if (std::isnan(chsh_value)) return false;
    return std::abs(chsh_value) > threshold;
}

quantum::TwoQubitState intercept_resend_attack(const quantum::TwoQubitState& state, Rng& eve_rng) {
    // Eve guesses Z or X, measures the qubit headed to Bob, and resends the
    // collapsed state. She never learns the basis Bob will use.
    const quantum::BasisDirection eve_basis(eve_rng.next_bool() ? kPi / 2 : 0.0);
    return quantum::measure_qubit(state, 1, eve_basis, eve_rng).post;
}

ReportRow key_generation_report(const ProtocolResult& result) {
    ReportRow row;
    row.singlets = result.rounds.size();
    row.key_bits = result.sifted_key.size();
    row.time_s = result.elapsed_s;
    row.rate_bps = result.key_rate_bps;
    row.chsh = result.chsh_value;
    row.secure = result.secure;
    return row;
}

std::string report_csv_header() { return "singlets,key_bits,time_s,rate_bps,chsh,secure"; }

std::string report_csv_row(const ReportRow& row) {
    std::ostringstream out;
    out << row.singlets << ',' << row.key_bits << ',' << row.time_s << ',' << row.rate_bps << ','
        << row.chsh << ',' << (row.secure ? "true" : "false");
    return out.str();
}

}  // namespace qse::e91
