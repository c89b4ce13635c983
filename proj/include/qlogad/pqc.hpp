#pragma once

#include <string>
#include <vector>

#include "qlogad/encode.hpp"
#include "qlogad/qsim.hpp"

namespace qlogad::pqc {

/// Rotation layout of one variational layer. Rx and Rz place one rotation
/// per qubit, RxRy and RyRx place two (in the named order). Every layer is
/// followed by the entangling chain Cnot(0->1), Cnot(1->2), ...
enum class Layout { Rx, RxRy, RyRx, Rz };

const char* to_string(Layout layout);
Layout layout_from_string(const std::string& name);

struct CircuitDesign {
    Layout layout = Layout::Rx;
    int n_qubits = 4;
    int n_layers = 1;
    encode::Scheme encoding = encode::Scheme::AngleRx;
    bool ring = false; // close the Cnot chain with Cnot(n-1 -> 0)
    // Put a Hadamard layer before the encoding rotations. Off by default:
    // encoding rotations act on |0...0>, which keeps every axis/layout
    // combination informative under the per-qubit Z readout. With the H
    // layer, Rx rotations commute through the |+> state (X eigenstate) and
    // an Rx-encoded, Rx-rotated circuit reads out a constant.
    bool h_prep = false;

    int rotations_per_qubit() const {
        return (layout == Layout::RxRy || layout == Layout::RyRx) ? 2 : 1;
    }
    int parameter_count() const { return n_layers * n_qubits * rotations_per_qubit(); }
};

/// State preparation for a circuit: amplitude encoding, or per-qubit angle
/// rotations on |0...0> (preceded by H on every qubit when h_prep is set).
qsim::StateVector prepare_state(const CircuitDesign& design, const std::vector<double>& features);

/// One compiled gate. param_index >= 0 marks a trainable rotation whose
/// angle comes from the parameter vector; -1 marks a fixed gate.
struct CompiledGate {
    qsim::Gate gate;
    int param_index = -1;
};

/// Expand a design into its gate list. Parameter indices run layer-major,
/// qubit-minor, rotation order within a qubit.
std::vector<CompiledGate> build_circuit(const CircuitDesign& design);

/// Run a compiled program on an explicit initial state and read out
/// [<Z_0>, ..., <Z_{n-1}>]. Exposed for harnesses that skip encoding.
std::vector<double> run_compiled(const std::vector<CompiledGate>& program,
                                 const std::vector<double>& params, qsim::StateVector state);

/// Encode `features` per the design, apply the parameterized gates, and
/// return the per-qubit Z expectations.
std::vector<double> forward(const CircuitDesign& design, const std::vector<double>& params,
                            const std::vector<double>& features);

/// d(upstream . z)/d(params) via the parameter-shift rule: two shifted
/// forward passes per parameter.
std::vector<double> gradient_params(const CircuitDesign& design, const std::vector<double>& params,
                                    const std::vector<double>& features,
                                    const std::vector<double>& upstream);

/// d(upstream . z)/d(features). Angle encodings use the exact shift rule on
/// the encoding rotations; amplitude encoding falls back to central finite
/// differences (h = 1e-5) unless the fallback is disabled.
std::vector<double> gradient_inputs(const CircuitDesign& design, const std::vector<double>& params,
                                    const std::vector<double>& features,
                                    const std::vector<double>& upstream,
                                    bool allow_amplitude_fd = true);

/// Plain-text round trip for experiment reproducibility.
std::string to_config_string(const CircuitDesign& design);
CircuitDesign design_from_config_string(const std::string& text);

} // namespace qlogad::pqc
