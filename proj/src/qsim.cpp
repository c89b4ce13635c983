#include "qlogad/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlogad::qsim {

namespace {

void check_qubit(int qubit, int n_qubits, const char* what) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw std::invalid_argument(std::string(what) + " qubit index " + std::to_string(qubit) +
                                    " out of range for " + std::to_string(n_qubits) + " qubits");
    }
}

} // namespace

StateVector zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                                    "], got " + std::to_string(n_qubits));
    }
    StateVector state;
    state.n_qubits = n_qubits;
    state.amplitudes.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    state.amplitudes[0] = Complex{1.0, 0.0};
    return state;
}

std::array<Complex, 4> gate_matrix(GateKind kind, double angle) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    switch (kind) {
    case GateKind::H:
        return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
    case GateKind::X:
        return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
        return {0.0, -i, i, 0.0};
    case GateKind::Z:
        return {1.0, 0.0, 0.0, -1.0};
    case GateKind::Rx: {
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        return {Complex{c, 0.0}, Complex{0.0, -s}, Complex{0.0, -s}, Complex{c, 0.0}};
    }
    case GateKind::Ry: {
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        return {Complex{c, 0.0}, Complex{-s, 0.0}, Complex{s, 0.0}, Complex{c, 0.0}};
    }
    case GateKind::Rz: {
        const Complex e_neg = std::exp(Complex{0.0, -angle / 2.0});
        const Complex e_pos = std::exp(Complex{0.0, angle / 2.0});
        return {e_neg, 0.0, 0.0, e_pos};
    }
    case GateKind::Cnot:
        break;
    }
    throw std::invalid_argument("gate_matrix: Cnot has no 2x2 matrix");
}

namespace detail {

void apply_single_qubit_inplace(StateVector& state, GateKind kind, double angle, int target) {
    check_qubit(target, state.n_qubits, "target");
    const auto u = gate_matrix(kind, angle);
    // Qubit 0 is the MSB, so the bit position from the LSB is n-1-target.
    const std::size_t stride = std::size_t{1} << (state.n_qubits - 1 - target);
    const std::size_t dim = state.amplitudes.size();
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t offset = 0; offset < stride; ++offset) {
            const std::size_t i0 = block + offset;
            const std::size_t i1 = i0 + stride;
            const Complex a0 = state.amplitudes[i0];
            const Complex a1 = state.amplitudes[i1];
            state.amplitudes[i0] = u[0] * a0 + u[1] * a1;
            state.amplitudes[i1] = u[2] * a0 + u[3] * a1;
        }
    }
}

void apply_cnot_inplace(StateVector& state, int control, int target) {
    check_qubit(control, state.n_qubits, "control");
    check_qubit(target, state.n_qubits, "target");
    if (control == target) {
        throw std::invalid_argument("Cnot control and target must differ");
    }
    const std::size_t cmask = std::size_t{1} << (state.n_qubits - 1 - control);
    const std::size_t tmask = std::size_t{1} << (state.n_qubits - 1 - target);
    const std::size_t dim = state.amplitudes.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(state.amplitudes[i], state.amplitudes[i | tmask]);
        }
    }
}

void apply_gate_inplace(StateVector& state, const Gate& gate) {
    if (gate.kind == GateKind::Cnot) {
        apply_cnot_inplace(state, gate.control, gate.target);
    } else {
        apply_single_qubit_inplace(state, gate.kind, gate.angle, gate.target);
    }
}

} // namespace detail

StateVector apply_single_qubit(const Gate& gate, const StateVector& state) {
    if (gate.kind == GateKind::Cnot) {
        throw std::invalid_argument("apply_single_qubit cannot apply Cnot");
    }
    StateVector out = state;
    detail::apply_single_qubit_inplace(out, gate.kind, gate.angle, gate.target);
    return out;
}

StateVector apply_cnot(int control, int target, const StateVector& state) {
    StateVector out = state;
    detail::apply_cnot_inplace(out, control, target);
    return out;
}

StateVector apply_gate(const Gate& gate, const StateVector& state) {
    StateVector out = state;
    detail::apply_gate_inplace(out, gate);
    return out;
}

double expectation_z(const StateVector& state, int qubit) {
    check_qubit(qubit, state.n_qubits, "measured");
    const std::size_t mask = std::size_t{1} << (state.n_qubits - 1 - qubit);
    double value = 0.0;
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        const double p = std::norm(state.amplitudes[i]);
        value += (i & mask) ? -p : p;
    }
    return value;
}

std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> probs(state.amplitudes.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(state.amplitudes[i]);
    }
    return probs;
}

double state_norm(const StateVector& state) {
    double sum = 0.0;
    for (const Complex& a : state.amplitudes) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

} // namespace qlogad::qsim
