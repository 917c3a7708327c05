#include "qse/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qse::quantum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

/// 2x2 (x) 2x2 Kronecker product, row-major.
std::array<Complex, 16> kron(const std::array<Complex, 4>& a, const std::array<Complex, 4>& b) {
    std::array<Complex, 16> out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out[static_cast<std::size_t>(2 * i + k) * 4 + (2 * j + l)] =
                        a[static_cast<std::size_t>(i) * 2 + j] * b[static_cast<std::size_t>(k) * 2 + l];
    return out;
}

double clamp_probability(double p) {
    if (p < 0.0) {
        if (p < -kTol) throw std::logic_error("negative probability beyond tolerance");
        return 0.0;
    }
    return p > 1.0 ? 1.0 : p;
}

int sample_from_four(const std::array<double, 4>& probs, Rng& rng) {
    const double r = rng.next_unit();
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        acc += probs[static_cast<std::size_t>(i)];
        if (r < acc) return i;
    }
    return 3;
}

}  // namespace

double TwoQubitState::norm_sq() const {
    double n = 0.0;
    for (const auto& a : amp) n += std::norm(a);
    return n;
}

bool TwoQubitState::is_normalized(double tol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
}

double DensityMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < 4; ++i) t += at(i, i).real();
    return t;
}

bool DensityMatrix::is_hermitian(double tol) const {
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
    return true;
}

DensityMatrix DensityMatrix::from_pure(const TwoQubitState& state) {
    DensityMatrix rho;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            rho.at(r, c) = state.amp[static_cast<std::size_t>(r)] *
                           std::conj(state.amp[static_cast<std::size_t>(c)]);
    return rho;
}

BasisDirection::BasisDirection(double angle_radians) : angle_(wrap_angle(angle_radians)) {}

std::array<Complex, 4> BasisDirection::observable() const {
    const double c = std::cos(angle_);
    const double s = std::sin(angle_);
    // cos*Z + sin*X
    return {Complex(c), Complex(s), Complex(s), Complex(-c)};
}

std::array<Complex, 4> BasisDirection::projector(int outcome) const {
    if (outcome != 1 && outcome != -1) throw std::invalid_argument("outcome must be +1 or -1");
    const double sgn = outcome;
    const double c = std::cos(angle_);
    const double s = std::sin(angle_);
    // (I + outcome * observable) / 2
    return {Complex((1.0 + sgn * c) / 2.0), Complex(sgn * s / 2.0),
            Complex(sgn * s / 2.0), Complex((1.0 - sgn * c) / 2.0)};
}

Gate Gate::pauli_x() {
    return Gate("X", 2, {Complex(0), Complex(1), Complex(1), Complex(0)});
}

Gate Gate::hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    return Gate("H", 2, {Complex(r), Complex(r), Complex(r), Complex(-r)});
}

Gate Gate::phase_s() {
    return Gate("S", 2, {Complex(1), Complex(0), Complex(0), Complex(0, 1)});
}

Gate Gate::t() {
    return Gate("T", 2, {Complex(1), Complex(0), Complex(0), std::polar(1.0, std::numbers::pi / 4)});
}

Gate Gate::ry(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return Gate("RY", 2, {Complex(c), Complex(-s), Complex(s), Complex(c)});
}

Gate Gate::cnot() {
    std::array<Complex, 16> u{};
    u[0 * 4 + 0] = 1;
    u[1 * 4 + 1] = 1;
    u[2 * 4 + 3] = 1;
    u[3 * 4 + 2] = 1;
    return Gate("CNOT", 4, u);
}

Gate Gate::adjoint() const {
    Gate g(*this);
    const int n = dim_;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            g.u_[static_cast<std::size_t>(r) * n + c] =
                std::conj(u_[static_cast<std::size_t>(c) * n + r]);
    g.name_ = name_ + "!";
    return g;
}

bool Gate::is_unitary(double tol) const {
    const int n = dim_;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            Complex dot = 0;
            for (int k = 0; k < n; ++k)
                dot += std::conj(u_[static_cast<std::size_t>(k) * n + r]) *
                       u_[static_cast<std::size_t>(k) * n + c];
            const Complex want = (r == c) ? Complex(1) : Complex(0);
            if (std::abs(dot - want) > tol) return false;
        }
    }
    return true;
}

TwoQubitState prepare_singlet() {
    const double r = 1.0 / std::numbers::sqrt2;
    TwoQubitState s;
    s.amp = {Complex(0), Complex(r), Complex(-r), Complex(0)};
    return s;
}

TwoQubitState prepare_basis_state(int q0, int q1) {
    if ((q0 != 0 && q0 != 1) || (q1 != 0 && q1 != 1))
        throw std::invalid_argument("basis state bits must be 0 or 1");
    TwoQubitState s;
    s.amp[static_cast<std::size_t>(2 * q0 + q1)] = 1;
    return s;
}

TwoQubitState apply_gate(const TwoQubitState& state, const Gate& gate, std::span<const int> targets) {
    const auto check_index = [](int q) {
        if (q != 0 && q != 1) throw std::invalid_argument("qubit index must be 0 or 1");
    };

    TwoQubitState out;
    if (gate.arity() == 1) {
        if (targets.size() != 1) throw std::invalid_argument("single-qubit gate takes one target");
        const int q = targets[0];
        check_index(q);
        // Index i = 2*q0 + q1; the target bit selects which pairs U mixes.
        const int stride = (q == 0) ? 2 : 1;
        for (int other = 0; other < 2; ++other) {
            const int i0 = (q == 0) ? other : 2 * other;
            const int i1 = i0 + stride;
            const Complex a0 = state.amp[static_cast<std::size_t>(i0)];
            const Complex a1 = state.amp[static_cast<std::size_t>(i1)];
            out.amp[static_cast<std::size_t>(i0)] = gate.entry(0, 0) * a0 + gate.entry(0, 1) * a1;
            out.amp[static_cast<std::size_t>(i1)] = gate.entry(1, 0) * a0 + gate.entry(1, 1) * a1;
        }
        return out;
    }

    if (targets.size() != 2) throw std::invalid_argument("CNOT takes (control, target)");
    const int control = targets[0];
    const int target = targets[1];
    check_index(control);
    check_index(target);
    if (control == target) throw std::invalid_argument("CNOT control and target must differ");

    for (int i = 0; i < 4; ++i) {
        const int control_bit = (control == 0) ? (i >> 1) & 1 : i & 1;
        const int j = (control_bit == 1) ? (i ^ (target == 0 ? 2 : 1)) : i;
        out.amp[static_cast<std::size_t>(j)] = state.amp[static_cast<std::size_t>(i)];
    }
    return out;
}

TwoQubitState apply_gate(const TwoQubitState& state, const Gate& gate,
                         std::initializer_list<int> targets) {
    return apply_gate(state, gate, std::span<const int>(targets.begin(), targets.size()));
}

std::array<double, 4> joint_distribution(const DensityMatrix& rho, const BasisDirection& basis_a,
                                         const BasisDirection& basis_b) {
    std::array<double, 4> probs{};
    const int outcomes[2] = {+1, -1};
    int idx = 0;
    for (int sa : outcomes) {
        const auto pa = basis_a.projector(sa);
        for (int sb : outcomes) {
            const auto pab = kron(pa, basis_b.projector(sb));
            // Tr(rho * P): sum_{r,c} rho(r,c) * P(c,r)
            Complex tr = 0;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    tr += rho.at(r, c) * pab[static_cast<std::size_t>(c) * 4 + r];
            probs[static_cast<std::size_t>(idx++)] = clamp_probability(tr.real());
        }
    }
    return probs;
}

std::array<double, 4> joint_distribution(const TwoQubitState& state, const BasisDirection& basis_a,
                                         const BasisDirection& basis_b) {
    return joint_distribution(DensityMatrix::from_pure(state), basis_a, basis_b);
}

double correlation(const std::array<double, 4>& joint) {
    return joint[0] - joint[1] - joint[2] + joint[3];
}

PairOutcome measure_pair(const DensityMatrix& rho, const BasisDirection& basis_a,
                         const BasisDirection& basis_b, Rng& rng) {
    const auto probs = joint_distribution(rho, basis_a, basis_b);
    const int k = sample_from_four(probs, rng);
    return {(k < 2) ? +1 : -1, (k % 2 == 0) ? +1 : -1};
}

PairOutcome measure_pair(const TwoQubitState& state, const BasisDirection& basis_a,
                         const BasisDirection& basis_b, Rng& rng) {
    return measure_pair(DensityMatrix::from_pure(state), basis_a, basis_b, rng);
}

SingleOutcome measure_qubit(const TwoQubitState& state, int qubit, const BasisDirection& basis,
                            Rng& rng) {
    if (qubit != 0 && qubit != 1) throw std::invalid_argument("qubit index must be 0 or 1");

    const auto apply_projector = [&](int outcome) {
        const auto p = basis.projector(outcome);
        TwoQubitState post;
        const int stride = (qubit == 0) ? 2 : 1;
        for (int other = 0; other < 2; ++other) {
            const int i0 = (qubit == 0) ? other : 2 * other;
            const int i1 = i0 + stride;
            const Complex a0 = state.amp[static_cast<std::size_t>(i0)];
            const Complex a1 = state.amp[static_cast<std::size_t>(i1)];
            post.amp[static_cast<std::size_t>(i0)] = p[0] * a0 + p[1] * a1;
            post.amp[static_cast<std::size_t>(i1)] = p[2] * a0 + p[3] * a1;
        }
        return post;
    };

    TwoQubitState plus = apply_projector(+1);
    const double p_plus = clamp_probability(plus.norm_sq());

    const int value = (rng.next_unit() < p_plus) ? +1 : -1;
    TwoQubitState post = (value == +1) ? plus : apply_projector(-1);
    const double n = std::sqrt(post.norm_sq());
    for (auto& a : post.amp) a /= n;
    return {value, post};
}

DensityMatrix depolarize(const TwoQubitState& pure, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing p must be in [0,1]");
    DensityMatrix rho = DensityMatrix::from_pure(pure);
    const double background = (1.0 - p) / 4.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            rho.at(r, c) = p * rho.at(r, c) + ((r == c) ? Complex(background) : Complex(0));
    return rho;
}

}  // namespace qse::quantum
