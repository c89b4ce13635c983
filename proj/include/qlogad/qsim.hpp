#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace qlogad::qsim {

using Complex = std::complex<double>;

// Hard cap on register width: 2^20 amplitudes (16 MiB) per state.
inline constexpr int kMaxQubits = 20;

/// Full statevector of an n-qubit register. Qubit 0 is the most
/// significant bit of the basis index, so |q0 q1 ... q_{n-1}> lives at
/// index q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.
struct StateVector {
    int n_qubits = 0;
    std::vector<Complex> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }
};

enum class GateKind { H, X, Y, Z, Rx, Ry, Rz, Cnot };

/// One gate application. `angle` is meaningful for Rx/Ry/Rz, `control`
/// for Cnot only. Rotations follow the exp(-i*angle/2 * sigma) convention.
struct Gate {
    GateKind kind = GateKind::H;
    double angle = 0.0;
    int target = 0;
    int control = -1;

    static Gate h(int q) { return {GateKind::H, 0.0, q, -1}; }
    static Gate x(int q) { return {GateKind::X, 0.0, q, -1}; }
    static Gate y(int q) { return {GateKind::Y, 0.0, q, -1}; }
    static Gate z(int q) { return {GateKind::Z, 0.0, q, -1}; }
    static Gate rx(int q, double a) { return {GateKind::Rx, a, q, -1}; }
    static Gate ry(int q, double a) { return {GateKind::Ry, a, q, -1}; }
    static Gate rz(int q, double a) { return {GateKind::Rz, a, q, -1}; }
    static Gate cnot(int control, int target) { return {GateKind::Cnot, 0.0, target, control}; }
};

/// Value of qubit `qubit` in basis index `index` (qubit 0 = MSB).
inline int qubit_bit(std::size_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1u);
}

/// |0...0> on n_qubits. Throws std::invalid_argument outside [1, kMaxQubits].
StateVector zero_state(int n_qubits);

/// Dense 2x2 matrix (row-major) of a non-Cnot gate kind.
std::array<Complex, 4> gate_matrix(GateKind kind, double angle = 0.0);

/// Apply a single-qubit gate; the input state is left unmodified.
StateVector apply_single_qubit(const Gate& gate, const StateVector& state);

/// Apply Cnot(control -> target); the input state is left unmodified.
StateVector apply_cnot(int control, int target, const StateVector& state);

/// Dispatch on gate kind.
StateVector apply_gate(const Gate& gate, const StateVector& state);

/// Exact <Z_qubit> = sum_i |a_i|^2 * (+1 if qubit bit of i is 0 else -1).
double expectation_z(const StateVector& state, int qubit);

/// Outcome distribution |a_i|^2 over all 2^n basis states.
std::vector<double> probabilities(const StateVector& state);

/// Euclidean norm of the amplitude vector.
double state_norm(const StateVector& state);

namespace detail {
// In-place fast paths used by circuit execution; same math as the
// pure functions above.
void apply_single_qubit_inplace(StateVector& state, GateKind kind, double angle, int target);
void apply_cnot_inplace(StateVector& state, int control, int target);
void apply_gate_inplace(StateVector& state, const Gate& gate);
} // namespace detail

} // namespace qlogad::qsim
