#include "qlogad/pqc.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qlogad::pqc {

const char* to_string(Layout layout) {
    switch (layout) {
    case Layout::Rx: return "rx";
    case Layout::RxRy: return "rxry";
    case Layout::RyRx: return "ryrx";
    case Layout::Rz: return "rz";
    }
    return "?";
}

Layout layout_from_string(const std::string& name) {
    if (name == "rx") return Layout::Rx;
    if (name == "rxry") return Layout::RxRy;
    if (name == "ryrx") return Layout::RyRx;
    if (name == "rz") return Layout::Rz;
    throw std::invalid_argument("unknown circuit layout: " + name);
}

namespace {

void check_design(const CircuitDesign& design) {
    if (design.n_qubits < 1 || design.n_qubits > qsim::kMaxQubits) {
        throw std::invalid_argument("circuit design: bad qubit count");
    }
    if (design.n_layers < 1) {
        throw std::invalid_argument("circuit design: n_layers must be positive");
    }
}

std::vector<qsim::GateKind> rotation_kinds(Layout layout) {
    switch (layout) {
    case Layout::Rx: return {qsim::GateKind::Rx};
    case Layout::RxRy: return {qsim::GateKind::Rx, qsim::GateKind::Ry};
    case Layout::RyRx: return {qsim::GateKind::Ry, qsim::GateKind::Rx};
    case Layout::Rz: return {qsim::GateKind::Rz};
    }
    return {};
}

} // namespace

std::vector<CompiledGate> build_circuit(const CircuitDesign& design) {
    check_design(design);
    const auto kinds = rotation_kinds(design.layout);
    std::vector<CompiledGate> program;
    program.reserve(static_cast<std::size_t>(design.parameter_count() + design.n_layers * design.n_qubits));
    int param_index = 0;
    for (int layer = 0; layer < design.n_layers; ++layer) {
        for (int q = 0; q < design.n_qubits; ++q) {
            for (qsim::GateKind kind : kinds) {
                program.push_back({qsim::Gate{kind, 0.0, q, -1}, param_index++});
            }
        }
        for (int q = 0; q + 1 < design.n_qubits; ++q) {
            program.push_back({qsim::Gate::cnot(q, q + 1), -1});
        }
        if (design.ring && design.n_qubits > 1) {
            program.push_back({qsim::Gate::cnot(design.n_qubits - 1, 0), -1});
        }
    }
    return program;
}

std::vector<double> run_compiled(const std::vector<CompiledGate>& program,
                                 const std::vector<double>& params, qsim::StateVector state) {
    for (const CompiledGate& slot : program) {
        qsim::Gate gate = slot.gate;
        if (slot.param_index >= 0) {
            if (static_cast<std::size_t>(slot.param_index) >= params.size()) {
                throw std::invalid_argument("run_compiled: parameter vector too short");
            }
            gate.angle = params[static_cast<std::size_t>(slot.param_index)];
        }
        qsim::detail::apply_gate_inplace(state, gate);
    }
    std::vector<double> z(static_cast<std::size_t>(state.n_qubits));
    for (int q = 0; q < state.n_qubits; ++q) {
        z[static_cast<std::size_t>(q)] = qsim::expectation_z(state, q);
    }
    return z;
}

qsim::StateVector prepare_state(const CircuitDesign& design, const std::vector<double>& features) {
    if (!encode::is_angle_scheme(design.encoding)) {
        return encode::amplitude_encode_to(features, design.n_qubits);
    }
    if (design.h_prep) {
        return encode::encode_features(features, design.encoding, design.n_qubits);
    }
    if (features.size() != static_cast<std::size_t>(design.n_qubits)) {
        throw std::invalid_argument("prepare_state: angle encoding needs one feature per qubit");
    }
    const qsim::GateKind kind = design.encoding == encode::Scheme::AngleRx   ? qsim::GateKind::Rx
                                : design.encoding == encode::Scheme::AngleRy ? qsim::GateKind::Ry
                                                                             : qsim::GateKind::Rz;
    qsim::StateVector state = qsim::zero_state(design.n_qubits);
    for (int q = 0; q < design.n_qubits; ++q) {
        if (!std::isfinite(features[static_cast<std::size_t>(q)])) {
            throw std::invalid_argument("prepare_state: non-finite feature");
        }
        qsim::detail::apply_single_qubit_inplace(state, kind, features[static_cast<std::size_t>(q)],
                                                 q);
    }
    return state;
}

std::vector<double> forward(const CircuitDesign& design, const std::vector<double>& params,
                            const std::vector<double>& features) {
    check_design(design);
    if (params.size() != static_cast<std::size_t>(design.parameter_count())) {
        throw std::invalid_argument("forward: expected " + std::to_string(design.parameter_count()) +
                                    " circuit parameters, got " + std::to_string(params.size()));
    }
    return run_compiled(build_circuit(design), params, prepare_state(design, features));
}

namespace {

double weighted(const std::vector<double>& z, const std::vector<double>& upstream) {
    if (z.size() != upstream.size()) {
        throw std::invalid_argument("upstream length must match the qubit count");
    }
    double total = 0.0;
    for (std::size_t q = 0; q < z.size(); ++q) {
        total += z[q] * upstream[q];
    }
    return total;
}

} // namespace

std::vector<double> gradient_params(const CircuitDesign& design, const std::vector<double>& params,
                                    const std::vector<double>& features,
                                    const std::vector<double>& upstream) {
    constexpr double shift = std::numbers::pi / 2.0;
    std::vector<double> grad(params.size(), 0.0);
    std::vector<double> shifted = params;
    for (std::size_t j = 0; j < params.size(); ++j) {
        shifted[j] = params[j] + shift;
        const double plus = weighted(forward(design, shifted, features), upstream);
        shifted[j] = params[j] - shift;
        const double minus = weighted(forward(design, shifted, features), upstream);
        shifted[j] = params[j];
        grad[j] = 0.5 * (plus - minus);
    }
    return grad;
}

std::vector<double> gradient_inputs(const CircuitDesign& design, const std::vector<double>& params,
                                    const std::vector<double>& features,
                                    const std::vector<double>& upstream, bool allow_amplitude_fd) {
    std::vector<double> grad(features.size(), 0.0);
    std::vector<double> shifted = features;
    if (encode::is_angle_scheme(design.encoding)) {
        // Each feature parameterizes exactly one exp(-i*x/2*P) rotation, so
        // the same shift rule applies.
        constexpr double shift = std::numbers::pi / 2.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            shifted[i] = features[i] + shift;
            const double plus = weighted(forward(design, params, shifted), upstream);
            shifted[i] = features[i] - shift;
            const double minus = weighted(forward(design, params, shifted), upstream);
            shifted[i] = features[i];
            grad[i] = 0.5 * (plus - minus);
        }
        return grad;
    }
    if (!allow_amplitude_fd) {
        throw std::runtime_error(
            "gradient_inputs: amplitude encoding has no shift rule and the "
            "finite-difference fallback is disabled");
    }
    constexpr double h = 1e-5;
    for (std::size_t i = 0; i < features.size(); ++i) {
        shifted[i] = features[i] + h;
        const double plus = weighted(forward(design, params, shifted), upstream);
        shifted[i] = features[i] - h;
        const double minus = weighted(forward(design, params, shifted), upstream);
        shifted[i] = features[i];
        grad[i] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

std::string to_config_string(const CircuitDesign& design) {
    std::ostringstream out;
    out << "layout=" << to_string(design.layout) << "\n"
        << "qubits=" << design.n_qubits << "\n"
        << "layers=" << design.n_layers << "\n"
        << "encoding=" << encode::to_string(design.encoding) << "\n"
        << "ring=" << (design.ring ? 1 : 0) << "\n"
        << "h_prep=" << (design.h_prep ? 1 : 0) << "\n";
    return out.str();
}

CircuitDesign design_from_config_string(const std::string& text) {
    CircuitDesign design;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "layout") {
            design.layout = layout_from_string(value);
        } else if (key == "qubits") {
            design.n_qubits = std::stoi(value);
        } else if (key == "layers") {
            design.n_layers = std::stoi(value);
        } else if (key == "encoding") {
            design.encoding = encode::scheme_from_string(value);
        } else if (key == "ring") {
            design.ring = value != "0";
        } else if (key == "h_prep") {
            design.h_prep = value != "0";
        } else {
            throw std::invalid_argument("unknown circuit config key: " + key);
        }
    }
    check_design(design);
    return design;
}

} // namespace qlogad::pqc
