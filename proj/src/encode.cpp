#include "qlogad/encode.hpp"

#include <cmath>
#include <stdexcept>

namespace qlogad::encode {

const char* to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::AngleRx: return "angle_rx";
    case Scheme::AngleRy: return "angle_ry";
    case Scheme::AngleRz: return "angle_rz";
    case Scheme::Amplitude: return "amplitude";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "angle_rx" || name == "rx") return Scheme::AngleRx;
    if (name == "angle_ry" || name == "ry") return Scheme::AngleRy;
    if (name == "angle_rz" || name == "rz") return Scheme::AngleRz;
    if (name == "amplitude") return Scheme::Amplitude;
    throw std::invalid_argument("unknown encoding scheme: " + name);
}

bool is_angle_scheme(Scheme scheme) {
    return scheme != Scheme::Amplitude;
}

qsim::StateVector prepare_uniform_superposition(int n_qubits) {
    qsim::StateVector state = qsim::zero_state(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        qsim::detail::apply_single_qubit_inplace(state, qsim::GateKind::H, 0.0, q);
    }
    return state;
}

qsim::StateVector angle_encode(const std::vector<double>& features, Axis axis) {
    const int n_qubits = static_cast<int>(features.size());
    for (double f : features) {
        if (!std::isfinite(f)) {
            throw std::invalid_argument("angle_encode: non-finite feature");
        }
    }
    qsim::StateVector state = prepare_uniform_superposition(n_qubits);
    const qsim::GateKind kind = axis == Axis::X   ? qsim::GateKind::Rx
                                : axis == Axis::Y ? qsim::GateKind::Ry
                                                  : qsim::GateKind::Rz;
    for (int q = 0; q < n_qubits; ++q) {
        qsim::detail::apply_single_qubit_inplace(state, kind, features[static_cast<std::size_t>(q)], q);
    }
    return state;
}

namespace {

qsim::StateVector fill_amplitudes(const std::vector<double>& features, int n_qubits) {
    double norm_sq = 0.0;
    for (double f : features) {
        if (!std::isfinite(f)) {
            throw std::invalid_argument("amplitude_encode: non-finite feature");
        }
        norm_sq += f * f;
    }
    if (norm_sq <= 0.0) {
        throw std::invalid_argument("amplitude_encode: cannot normalize an all-zero vector");
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    qsim::StateVector state = qsim::zero_state(n_qubits);
    state.amplitudes.assign(state.dim(), qsim::Complex{0.0, 0.0});
    for (std::size_t i = 0; i < features.size(); ++i) {
        state.amplitudes[i] = qsim::Complex{features[i] * inv_norm, 0.0};
    }
    return state;
}

} // namespace

qsim::StateVector amplitude_encode(const std::vector<double>& features) {
    if (features.empty()) {
        throw std::invalid_argument("amplitude_encode: empty feature vector");
    }
    int n_qubits = 1;
    while ((std::size_t{1} << n_qubits) < features.size()) {
        ++n_qubits;
    }
    if (n_qubits > qsim::kMaxQubits) {
        throw std::invalid_argument("amplitude_encode: feature vector exceeds the simulator cap");
    }
    return fill_amplitudes(features, n_qubits);
}

qsim::StateVector amplitude_encode_to(const std::vector<double>& features, int n_qubits) {
    if (n_qubits < 1 || n_qubits > qsim::kMaxQubits) {
        throw std::invalid_argument("amplitude_encode_to: bad qubit count");
    }
    if (features.size() > (std::size_t{1} << n_qubits)) {
        throw std::invalid_argument("amplitude_encode_to: " + std::to_string(features.size()) +
                                    " features do not fit in 2^" + std::to_string(n_qubits) +
                                    " amplitudes");
    }
    return fill_amplitudes(features, n_qubits);
}

qsim::StateVector encode_features(const std::vector<double>& features, Scheme scheme,
                                  int n_qubits) {
    if (is_angle_scheme(scheme)) {
        if (features.size() != static_cast<std::size_t>(n_qubits)) {
            throw std::invalid_argument("angle encoding needs one feature per qubit, got " +
                                        std::to_string(features.size()) + " for " +
                                        std::to_string(n_qubits) + " qubits");
        }
        const Axis axis = scheme == Scheme::AngleRx   ? Axis::X
                          : scheme == Scheme::AngleRy ? Axis::Y
                                                      : Axis::Z;
        return angle_encode(features, axis);
    }
    return amplitude_encode_to(features, n_qubits);
}

std::size_t expected_feature_dim(Scheme scheme, int n_qubits) {
    (void)scheme;
    return static_cast<std::size_t>(n_qubits);
}

} // namespace qlogad::encode
