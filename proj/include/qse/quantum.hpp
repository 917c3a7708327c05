#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>

#include "qse/rng.hpp"

namespace qse::quantum {

using Complex = std::complex<double>;

/// Tolerance for exact algebraic identities (normalization, unitarity,
/// analytic correlation laws). Sampled quantities get statistical bounds
/// instead.
inline constexpr double kTol = 1e-12;

/// Pure state of a qubit pair. Amplitude order |00>, |01>, |10>, |11>,
/// where the first symbol is qubit 0.
struct TwoQubitState {
    std::array<Complex, 4> amp{};

    double norm_sq() const;
    bool is_normalized(double tol = kTol) const;
};

/// 4x4 mixed state, row-major.
struct DensityMatrix {
    std::array<Complex, 16> m{};

    Complex& at(int row, int col) { return m[static_cast<std::size_t>(row) * 4 + col]; }
    const Complex& at(int row, int col) const { return m[static_cast<std::size_t>(row) * 4 + col]; }

    double trace() const;
    bool is_hermitian(double tol = kTol) const;

    static DensityMatrix from_pure(const TwoQubitState& state);
};

/// A measurement direction in the X-Z plane. The measured observable is
/// cos(angle)*Z + sin(angle)*X, with +-1 outcomes.
class BasisDirection {
public:
    explicit BasisDirection(double angle_radians);

    double angle() const { return angle_; }

    /// 2x2 matrix of the observable, row-major.
    std::array<Complex, 4> observable() const;

    /// Eigenprojector for the given outcome (+1 or -1), row-major 2x2.
    std::array<Complex, 4> projector(int outcome) const;

private:
    double angle_;  // wrapped into [0, 2*pi)
};

/// A unitary gate: 2x2 for single-qubit gates, 4x4 for CNOT.
class Gate {
public:
    static Gate pauli_x();
    static Gate hadamard();
    static Gate phase_s();
    static Gate t();
    static Gate ry(double theta);
    static Gate cnot();

    int arity() const { return dim_ == 2 ? 1 : 2; }
    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    Complex entry(int row, int col) const { return u_[static_cast<std::size_t>(row) * dim_ + col]; }

    Gate adjoint() const;
    bool is_unitary(double tol = kTol) const;

private:
    Gate(std::string name, int dim, std::array<Complex, 16> u)
        : name_(std::move(name)), dim_(dim), u_(u) {}

    std::string name_;
    int dim_;
    std::array<Complex, 16> u_{};  // row-major; 2x2 gates use the first 4 slots
};

/// The singlet (|01> - |10>)/sqrt(2).
TwoQubitState prepare_singlet();

/// Computational basis state |q0 q1>.
TwoQubitState prepare_basis_state(int q0, int q1);

/// Apply a gate to the given qubits. Single-qubit gates take one target,
/// CNOT takes (control, target). Throws std::invalid_argument on bad targets.
TwoQubitState apply_gate(const TwoQubitState& state, const Gate& gate, std::span<const int> targets);
TwoQubitState apply_gate(const TwoQubitState& state, const Gate& gate, std::initializer_list<int> targets);

/// Born-rule joint outcome probabilities for measuring basis_a on qubit 0
/// and basis_b on qubit 1. Order: (+1,+1), (+1,-1), (-1,+1), (-1,-1).
/// Entries are clamped to [0,1] against roundoff and sum to 1 within kTol.
std::array<double, 4> joint_distribution(const DensityMatrix& rho, const BasisDirection& basis_a,
                                         const BasisDirection& basis_b);
std::array<double, 4> joint_distribution(const TwoQubitState& state, const BasisDirection& basis_a,
                                         const BasisDirection& basis_b);

/// <ab> expectation implied by a joint distribution.
double correlation(const std::array<double, 4>& joint);

struct PairOutcome {
    int a;  // +-1
    int b;  // +-1
};

/// Sample one joint measurement from the Born-rule table. Deterministic
/// given the rng state.
PairOutcome measure_pair(const DensityMatrix& rho, const BasisDirection& basis_a,
                         const BasisDirection& basis_b, Rng& rng);
PairOutcome measure_pair(const TwoQubitState& state, const BasisDirection& basis_a,
                         const BasisDirection& basis_b, Rng& rng);

struct SingleOutcome {
    int value;            // +-1
    TwoQubitState post;   // normalized post-measurement state
};

/// Projective measurement of one qubit of a pure state, collapsing it.
SingleOutcome measure_qubit(const TwoQubitState& state, int qubit, const BasisDirection& basis,
                            Rng& rng);

/// Isotropic depolarizing channel: p*|psi><psi| + (1-p)/4 * I.
/// Throws std::invalid_argument unless 0 <= p <= 1.
DensityMatrix depolarize(const TwoQubitState& pure, double p);

}  // namespace qse::quantum
