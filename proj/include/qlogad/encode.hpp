#pragma once

#include <string>
#include <vector>

#include "qlogad/qsim.hpp"

namespace qlogad::encode {

enum class Scheme { AngleRx, AngleRy, AngleRz, Amplitude };
enum class Axis { X, Y, Z };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);
bool is_angle_scheme(Scheme scheme);

/// H on every qubit of |0...0>: all 2^n amplitudes equal 1/sqrt(2^n).
qsim::StateVector prepare_uniform_superposition(int n_qubits);

/// One qubit per feature: rotate qubit i of the uniform superposition by
/// R_axis(features[i]). Features are raw radians.
qsim::StateVector angle_encode(const std::vector<double>& features, Axis axis);

/// Normalize the feature vector and write it directly into the amplitudes,
/// zero-padding to the next power of two (at least one qubit).
qsim::StateVector amplitude_encode(const std::vector<double>& features);

/// Amplitude encoding into a register of exactly `n_qubits`; features must
/// fit in 2^n_qubits slots and are zero-padded when shorter.
qsim::StateVector amplitude_encode_to(const std::vector<double>& features, int n_qubits);

/// Dispatch on scheme with the register width fixed by the caller. Angle
/// schemes require exactly n_qubits features.
qsim::StateVector encode_features(const std::vector<double>& features, Scheme scheme,
                                  int n_qubits);

/// Feature-vector length a circuit of `n_qubits` expects for this scheme.
/// All four schemes consume one value per qubit here: angle encodings by
/// definition, amplitude encoding via zero-padding to 2^n slots.
std::size_t expected_feature_dim(Scheme scheme, int n_qubits);

} // namespace qlogad::encode
