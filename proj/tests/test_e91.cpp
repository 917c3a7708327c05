#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <vector>

#include "qse/e91.hpp"
#include "qse/errors.hpp"
#include "qse/quantum.hpp"

using namespace qse;
using namespace qse::e91;

namespace {

constexpr double kIdealChsh = -2.0 * std::numbers::sqrt2;

double binomial_sigma(double n, double p) { return std::sqrt(n * p * (1.0 - p)); }

/// Sample CHSH from exact Born expectations rather than outcomes.
double exact_chsh_for(const quantum::DensityMatrix& rho) {
    const auto& a = alice_bases();
    const auto& b = bob_bases();
    const auto e = [&](int ai, int bi) {
        return quantum::correlation(quantum::joint_distribution(
            rho, a[static_cast<std::size_t>(ai)], b[static_cast<std::size_t>(bi)]));
    };
    return e(0, 0) - e(0, 2) + e(2, 0) + e(2, 2);
}

MeasurementRound make_round(std::size_t i, int ab, int bb, int ao, int bo) {
    return MeasurementRound{i, ab, bb, ao, bo};
}

}  // namespace

TEST_CASE("basis tables match the named observables") {
    // Alice: Z, (X+Z)/sqrt2, X. Bob: (X+Z)/sqrt2, X, (X-Z)/sqrt2.
    const double r = 1.0 / std::numbers::sqrt2;
    const std::array<std::array<double, 4>, 3> alice_want = {{
        {1, 0, 0, -1},
        {r, r, r, -r},
        {0, 1, 1, 0},
    }};
    const std::array<std::array<double, 4>, 3> bob_want = {{
        {r, r, r, -r},
        {0, 1, 1, 0},
        {-r, r, r, r},
    }};
    for (int i = 0; i < 3; ++i) {
        const auto oa = alice_bases()[static_cast<std::size_t>(i)].observable();
        const auto ob = bob_bases()[static_cast<std::size_t>(i)].observable();
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(oa[static_cast<std::size_t>(j)] -
                           quantum::Complex(alice_want[static_cast<std::size_t>(i)]
                                                      [static_cast<std::size_t>(j)])) < 1e-12);
            CHECK(std::abs(ob[static_cast<std::size_t>(j)] -
                           quantum::Complex(bob_want[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(j)])) < 1e-12);
        }
    }
}

TEST_CASE("run_protocol rejects zero singlets and survives a single round") {
    ChannelConfig channel;
    CHECK_THROWS_AS(run_protocol(0, channel, 1), std::invalid_argument);

    const ProtocolResult one = run_protocol(1, channel, 1);
    CHECK(one.rounds.size() == 1);
    CHECK(one.sifted_key.size() <= 1);
    CHECK_FALSE(one.secure);  // one round cannot certify anything
    CHECK(std::isnan(one.chsh_value));
}

TEST_CASE("sifted key length concentrates around the 2/9 fraction") {
    ChannelConfig channel;
    const struct {
        std::size_t n;
        std::size_t reference_key_len;
    } rows[] = {{25, 7}, {100, 25}, {250, 57}, {500, 106}};

    for (const auto& row : rows) {
        const double mean = static_cast<double>(row.n) * 2.0 / 9.0;
        const double bound = 3.0 * binomial_sigma(static_cast<double>(row.n), 2.0 / 9.0);

        const ProtocolResult result = run_protocol(row.n, channel, 42);
        CHECK(std::abs(static_cast<double>(result.sifted_key.size()) - mean) <= bound);

        // Published reference key lengths sit inside the same bounds.
        CHECK(std::abs(static_cast<double>(row.reference_key_len) - mean) <= bound);
    }
}

TEST_CASE("sifting keeps matching-observable rounds and flips Bob's convention") {
    std::vector<MeasurementRound> rounds;
    rounds.push_back(make_round(0, 2, 1, +1, -1));  // key round, anti-correlated
    rounds.push_back(make_round(1, 1, 3, +1, +1));  // CHSH round, no key bit
    rounds.push_back(make_round(2, 3, 2, -1, +1));  // key round
    rounds.push_back(make_round(3, 2, 2, +1, -1));  // mismatched, discarded

    const SiftedKeys keys = sift(rounds);
    CHECK(keys.alice == "01");
    CHECK(keys.bob == "01");
}

TEST_CASE("noiseless channel gives identical keys for every seed") {
    ChannelConfig channel;
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull, 123456ull}) {
        const ProtocolResult result = run_protocol(500, channel, seed);
        const SiftedKeys keys = sift(result.rounds);
        CHECK(keys.alice == keys.bob);
        CHECK(result.sifted_key == keys.alice);
    }
}

TEST_CASE("chsh_statistic approaches -2*sqrt(2) on the clean channel") {
    ChannelConfig channel;
    const ProtocolResult result = run_protocol(10000, channel, 7);
    CHECK(std::abs(result.chsh_value - kIdealChsh) < 0.1);
    CHECK(result.secure);
}

TEST_CASE("chsh_statistic is near zero on a fully depolarized channel") {
    ChannelConfig channel;
    channel.depolarizing_p = 0.0;
    const ProtocolResult result = run_protocol(10000, channel, 7);
    // Each cell holds ~1111 rounds of fair coin products.
    CHECK(std::abs(result.chsh_value) < 0.25);
    CHECK_FALSE(result.secure);
}

TEST_CASE("partially depolarized channel scales the CHSH value") {
    // Exact expectation path.
    const auto rho = quantum::depolarize(quantum::prepare_singlet(), 0.7);
    CHECK(exact_chsh_for(rho) == doctest::Approx(0.7 * kIdealChsh).epsilon(1e-12));

    // Sampled path, 3-sigma band around the scaled value.
    ChannelConfig channel;
    channel.depolarizing_p = 0.7;
    const ProtocolResult result = run_protocol(20000, channel, 11);
    CHECK(std::abs(result.chsh_value - 0.7 * kIdealChsh) < 0.15);
}

TEST_CASE("chsh_statistic names the basis pair it is missing") {
    std::vector<MeasurementRound> rounds;
    rounds.push_back(make_round(0, 1, 1, +1, -1));
    rounds.push_back(make_round(1, 1, 3, +1, -1));
    rounds.push_back(make_round(2, 3, 1, +1, -1));
    // (a3,b3) never occurs.
    try {
        chsh_statistic(rounds);
        FAIL("expected InsufficientDataError");
    } catch (const InsufficientDataError& e) {
        CHECK(std::string(e.what()).find("a3") != std::string::npos);
        CHECK(std::string(e.what()).find("b3") != std::string::npos);
    }
}

TEST_CASE("detect_eavesdropper uses a strict threshold") {
    CHECK(detect_eavesdropper(-2.82, 2.5));
    CHECK_FALSE(detect_eavesdropper(-1.9, 2.5));
    CHECK_FALSE(detect_eavesdropper(-2.5, 2.5));  // boundary is insecure
    CHECK(detect_eavesdropper(2.82, 2.5));        // sign-symmetric

    CHECK_THROWS_AS(detect_eavesdropper(-2.8, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(detect_eavesdropper(-2.8, 2.9), std::invalid_argument);
}

TEST_CASE("intercept-resend collapses CHSH to -sqrt(2) in expectation") {
    // Brute-force oracle: average Eve's projective collapse over her basis
    // choice and outcomes, then evaluate CHSH exactly on the mixture.
    const quantum::TwoQubitState singlet = quantum::prepare_singlet();
    quantum::DensityMatrix averaged{};
    for (double angle : {0.0, std::numbers::pi / 2}) {
        const quantum::BasisDirection basis(angle);
        for (int outcome : {+1, -1}) {
            const auto p = basis.projector(outcome);
            // (I (x) P) |psi>
            quantum::TwoQubitState collapsed;
            for (int q0 = 0; q0 < 2; ++q0) {
                const auto a0 = singlet.amp[static_cast<std::size_t>(2 * q0)];
                const auto a1 = singlet.amp[static_cast<std::size_t>(2 * q0 + 1)];
                collapsed.amp[static_cast<std::size_t>(2 * q0)] = p[0] * a0 + p[1] * a1;
                collapsed.amp[static_cast<std::size_t>(2 * q0 + 1)] = p[2] * a0 + p[3] * a1;
            }
            // Weight 1/2 for the basis choice; the projection itself carries
            // the outcome probability.
            const auto term = quantum::DensityMatrix::from_pure(collapsed);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) averaged.at(r, c) += 0.5 * term.at(r, c);
        }
    }
    CHECK(averaged.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact_chsh_for(averaged) == doctest::Approx(-std::numbers::sqrt2).epsilon(1e-12));

    // The sampled attack agrees within 3 sigma and never certifies security.
    ChannelConfig channel;
    channel.eavesdropper = Attacker::intercept_resend;
    const ProtocolResult result = run_protocol(20000, channel, 3);
    CHECK(std::abs(result.chsh_value + std::numbers::sqrt2) < 0.15);
    CHECK(std::abs(result.chsh_value) <= 2.0);
    CHECK_FALSE(result.secure);
}

TEST_CASE("intercept-resend drives about 25% key disagreement") {
    ChannelConfig channel;
    channel.eavesdropper = Attacker::intercept_resend;
    const ProtocolResult result = run_protocol(20000, channel, 13);
    const SiftedKeys keys = sift(result.rounds);
    REQUIRE(keys.alice.size() == keys.bob.size());
    REQUIRE(keys.alice.size() > 3000);

    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < keys.alice.size(); ++i)
        if (keys.alice[i] != keys.bob[i]) ++mismatches;
    const double qber = static_cast<double>(mismatches) / static_cast<double>(keys.alice.size());
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(keys.alice.size()));
    CHECK(std::abs(qber - 0.25) < 3 * sigma);
}

TEST_CASE("eavesdropper detection fires on at least 99 of 100 seeded runs") {
    ChannelConfig channel;
    channel.eavesdropper = Attacker::intercept_resend;
    int insecure = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
        if (!run_protocol(500, channel, seed).secure) ++insecure;
    CHECK(insecure >= 99);
}

TEST_CASE("protocol runs are reproducible from the seed") {
    ChannelConfig channel;
    channel.depolarizing_p = 0.9;
    const ProtocolResult r1 = run_protocol(400, channel, 77);
    const ProtocolResult r2 = run_protocol(400, channel, 77);

    CHECK(r1.sifted_key == r2.sifted_key);
    CHECK(r1.chsh_value == r2.chsh_value);
    CHECK(r1.secure == r2.secure);
    REQUIRE(r1.rounds.size() == r2.rounds.size());
    for (std::size_t i = 0; i < r1.rounds.size(); ++i) {
        CHECK(r1.rounds[i].alice_basis == r2.rounds[i].alice_basis);
        CHECK(r1.rounds[i].bob_basis == r2.rounds[i].bob_basis);
        CHECK(r1.rounds[i].alice_outcome == r2.rounds[i].alice_outcome);
        CHECK(r1.rounds[i].bob_outcome == r2.rounds[i].bob_outcome);
    }

    const ProtocolResult other = run_protocol(400, channel, 78);
    CHECK(other.sifted_key != r1.sifted_key);
}

TEST_CASE("key generation report derives the rate from length and time") {
    ChannelConfig channel;
    const ProtocolResult result = run_protocol(500, channel, 21);
    const ReportRow row = key_generation_report(result);
    CHECK(row.singlets == 500);
    CHECK(row.key_bits == result.sifted_key.size());
    CHECK(row.rate_bps ==
          doctest::Approx(static_cast<double>(row.key_bits) / row.time_s).epsilon(1e-9));

    ProtocolResult empty;
    empty.elapsed_s = 1.0;
    const ReportRow zero = key_generation_report(empty);
    CHECK(zero.key_bits == 0);
    CHECK(zero.rate_bps == 0.0);
}

TEST_CASE("report rows serialize to the documented CSV layout") {
    CHECK(report_csv_header() == "singlets,key_bits,time_s,rate_bps,chsh,secure");
    ReportRow row;
    row.singlets = 500;
    row.key_bits = 106;
    row.time_s = 0.5;
    row.rate_bps = 212.0;
    row.chsh = -2.82;
    row.secure = true;
    CHECK(report_csv_row(row) == "500,106,0.5,212,-2.82,true");
}
