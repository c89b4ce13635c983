#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qlogad/qsim.hpp"

using namespace qlogad;
using qsim::Complex;
using qsim::Gate;
using qsim::GateKind;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

Gate random_gate(int n_qubits, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind_dist(0, 7);
    std::uniform_int_distribution<int> qubit_dist(0, n_qubits - 1);
    std::uniform_real_distribution<double> angle_dist(-2.0 * kPi, 2.0 * kPi);
    const GateKind kinds[] = {GateKind::H,  GateKind::X,  GateKind::Y,  GateKind::Z,
                              GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Cnot};
    GateKind kind = kinds[kind_dist(rng)];
    if (n_qubits < 2 && kind == GateKind::Cnot) {
        kind = GateKind::H;
    }
    Gate gate{kind, angle_dist(rng), qubit_dist(rng), -1};
    if (kind == GateKind::Cnot) {
        do {
            gate.control = qubit_dist(rng);
        } while (gate.control == gate.target);
    }
    return gate;
}

} // namespace

TEST_CASE("zero_state is |0...0> and enforces the register cap") {
    const auto one = qsim::zero_state(1);
    CHECK(one.amplitudes.size() == 2);
    CHECK(one.amplitudes[0] == Complex{1.0, 0.0});
    CHECK(one.amplitudes[1] == Complex{0.0, 0.0});

    const auto two = qsim::zero_state(2);
    CHECK(two.amplitudes.size() == 4);
    CHECK(two.amplitudes[0] == Complex{1.0, 0.0});
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(two.amplitudes[i] == Complex{0.0, 0.0});
    }

    CHECK_THROWS_AS(qsim::zero_state(21), std::invalid_argument);
    CHECK_THROWS_AS(qsim::zero_state(0), std::invalid_argument);
}

TEST_CASE("single-qubit gate examples") {
    const auto zero = qsim::zero_state(1);

    const auto plus = qsim::apply_single_qubit(Gate::h(0), zero);
    CHECK(plus.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(plus.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // Rx(pi) = exp(-i*pi*X/2) = -iX
    const auto flipped = qsim::apply_single_qubit(Gate::rx(0, kPi), zero);
    CHECK(std::abs(flipped.amplitudes[0]) < 1e-12);
    CHECK(std::abs(flipped.amplitudes[1] - Complex{0.0, -1.0}) < 1e-12);

    // Frozen from the dense 2x2 oracle: Ry(pi/3)|0> = [cos(pi/6), sin(pi/6)].
    const auto rotated = qsim::apply_single_qubit(Gate::ry(0, kPi / 3.0), zero);
    CHECK(rotated.amplitudes[0].real() == doctest::Approx(0.8660254037844387).epsilon(1e-12));
    CHECK(rotated.amplitudes[1].real() == doctest::Approx(0.5).epsilon(1e-12));
    const auto dense = oracle::apply_dense(Gate::ry(0, kPi / 3.0), zero.amplitudes, 1);
    CHECK(max_abs_diff(rotated.amplitudes, dense) < 1e-12);

    CHECK_THROWS_AS(qsim::apply_single_qubit(Gate::h(1), zero), std::invalid_argument);
    CHECK_THROWS_AS(qsim::apply_single_qubit(Gate::cnot(0, 1), qsim::zero_state(2)),
                    std::invalid_argument);
}

TEST_CASE("apply_single_qubit leaves its input untouched") {
    auto state = qsim::zero_state(1);
    const auto copy = state.amplitudes;
    (void)qsim::apply_single_qubit(Gate::h(0), state);
    CHECK(state.amplitudes == copy);
}

TEST_CASE("cnot truth table and Bell state") {
    // |10> -> |11>  (qubit 0 is the MSB)
    auto state = qsim::zero_state(2);
    state = qsim::apply_single_qubit(Gate::x(0), state);
    auto out = qsim::apply_cnot(0, 1, state);
    CHECK(std::abs(out.amplitudes[3] - Complex{1.0, 0.0}) < 1e-12);

    // |01> unchanged: control bit is 0.
    state = qsim::zero_state(2);
    state = qsim::apply_single_qubit(Gate::x(1), state);
    out = qsim::apply_cnot(0, 1, state);
    CHECK(std::abs(out.amplitudes[1] - Complex{1.0, 0.0}) < 1e-12);

    // (|00> + |10>)/sqrt(2) -> Bell state, checked against the dense oracle.
    state = qsim::zero_state(2);
    state = qsim::apply_single_qubit(Gate::h(0), state);
    out = qsim::apply_cnot(0, 1, state);
    const auto dense = oracle::apply_dense(Gate::cnot(0, 1), state.amplitudes, 2);
    CHECK(max_abs_diff(out.amplitudes, dense) < 1e-10);
    CHECK(std::abs(out.amplitudes[0].real() - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.amplitudes[3].real() - 1.0 / std::sqrt(2.0)) < 1e-12);

    CHECK_THROWS_AS(qsim::apply_cnot(1, 1, out), std::invalid_argument);
}

TEST_CASE("expectation_z basics and Ry(theta) analytic value") {
    const auto zero = qsim::zero_state(1);
    CHECK(qsim::expectation_z(zero, 0) == doctest::Approx(1.0));

    const auto plus = qsim::apply_single_qubit(Gate::h(0), zero);
    CHECK(qsim::expectation_z(plus, 0) == doctest::Approx(0.0).epsilon(1e-12));

    // <Z> of Ry(theta)|0> = cos(theta); cross-checked with the probability vector.
    const double theta = kPi / 3.0;
    const auto rotated = qsim::apply_single_qubit(Gate::ry(0, theta), zero);
    CHECK(qsim::expectation_z(rotated, 0) == doctest::Approx(0.5).epsilon(1e-12));
    const auto probs = qsim::probabilities(rotated);
    CHECK(qsim::expectation_z(rotated, 0) == doctest::Approx(probs[0] - probs[1]).epsilon(1e-12));

    CHECK_THROWS_AS(qsim::expectation_z(zero, 1), std::invalid_argument);
}

TEST_CASE("probabilities") {
    const auto zero = qsim::zero_state(1);
    auto probs = qsim::probabilities(zero);
    CHECK(probs[0] == doctest::Approx(1.0));
    CHECK(probs[1] == doctest::Approx(0.0));

    probs = qsim::probabilities(qsim::apply_single_qubit(Gate::h(0), zero));
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Amplitude-encoded [3,4]: squared normalized features.
    qsim::StateVector encoded;
    encoded.n_qubits = 1;
    encoded.amplitudes = {Complex{0.6, 0.0}, Complex{0.8, 0.0}};
    probs = qsim::probabilities(encoded);
    CHECK(probs[0] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("gate matrices are unitary and match the standard entries") {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const auto h = qsim::gate_matrix(GateKind::H);
    CHECK(h[0] == Complex{inv_sqrt2, 0.0});
    CHECK(h[1] == Complex{inv_sqrt2, 0.0});
    CHECK(h[2] == Complex{inv_sqrt2, 0.0});
    CHECK(h[3] == Complex{-inv_sqrt2, 0.0});

    const auto x = qsim::gate_matrix(GateKind::X);
    CHECK(x[0] == Complex{0.0, 0.0});
    CHECK(x[1] == Complex{1.0, 0.0});
    const auto y = qsim::gate_matrix(GateKind::Y);
    CHECK(y[1] == Complex{0.0, -1.0});
    CHECK(y[2] == Complex{0.0, 1.0});
    const auto z = qsim::gate_matrix(GateKind::Z);
    CHECK(z[0] == Complex{1.0, 0.0});
    CHECK(z[3] == Complex{-1.0, 0.0});

    // U^dag U = I within 1e-12 for every parameterized kind as well.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-6.0, 6.0);
    for (GateKind kind : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::Rx,
                          GateKind::Ry, GateKind::Rz}) {
        const auto u = qsim::gate_matrix(kind, angle(rng));
        const Complex p00 = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2];
        const Complex p01 = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
        const Complex p11 = std::conj(u[1]) * u[1] + std::conj(u[3]) * u[3];
        CHECK(std::abs(p00 - Complex{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(p01) < 1e-12);
        CHECK(std::abs(p11 - Complex{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("1000 random gate applications preserve the norm") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> qubits_dist(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = qubits_dist(rng);
        const auto state = oracle::random_state(n, rng);
        const auto out = qsim::apply_gate(random_gate(n, rng), state);
        CHECK(std::abs(qsim::state_norm(out) - 1.0) <= 1e-10);
    }
}

TEST_CASE("X, Z, H, Cnot are involutions") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto state = oracle::random_state(3, rng);
        for (GateKind kind : {GateKind::X, GateKind::Z, GateKind::H}) {
            const Gate gate{kind, 0.0, 1, -1};
            const auto twice = qsim::apply_gate(gate, qsim::apply_gate(gate, state));
            CHECK(max_abs_diff(twice.amplitudes, state.amplitudes) <= 1e-10);
        }
        const auto twice = qsim::apply_cnot(0, 2, qsim::apply_cnot(0, 2, state));
        CHECK(max_abs_diff(twice.amplitudes, state.amplitudes) <= 1e-10);
    }
}

TEST_CASE("rotation composition: R(a) then R(b) equals R(a+b)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto state = oracle::random_state(2, rng);
        const double a = angle(rng), b = angle(rng);
        for (GateKind kind : {GateKind::Rx, GateKind::Ry, GateKind::Rz}) {
            const auto stepwise =
                qsim::apply_gate(Gate{kind, b, 0, -1}, qsim::apply_gate(Gate{kind, a, 0, -1}, state));
            const auto direct = qsim::apply_gate(Gate{kind, a + b, 0, -1}, state);
            CHECK(max_abs_diff(stepwise.amplitudes, direct.amplitudes) <= 1e-10);
        }
    }
}

TEST_CASE("sparse application equals dense matrix multiplication for n <= 3") {
    std::mt19937_64 rng(99);
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            const auto state = oracle::random_state(n, rng);
            const auto gate = random_gate(n, rng);
            const auto sparse = qsim::apply_gate(gate, state);
            const auto dense = oracle::apply_dense(gate, state.amplitudes, n);
            CHECK(max_abs_diff(sparse.amplitudes, dense) <= 1e-10);
        }
    }
}
