#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qlogad/encode.hpp"

using namespace qlogad;
using qsim::Complex;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("uniform superposition") {
    const auto one = encode::prepare_uniform_superposition(1);
    CHECK(std::abs(one.amplitudes[0] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);
    CHECK(std::abs(one.amplitudes[1] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);

    const auto two = encode::prepare_uniform_superposition(2);
    for (const auto& a : two.amplitudes) {
        CHECK(std::abs(a - Complex{0.5, 0.0}) < 1e-12);
    }

    // n=3 against a repeated single-qubit H oracle.
    auto expected = qsim::zero_state(3).amplitudes;
    for (int q = 0; q < 3; ++q) {
        expected = oracle::apply_dense(qsim::Gate::h(q), expected, 3);
    }
    const auto three = encode::prepare_uniform_superposition(3);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(three.amplitudes[i] - expected[i]) < 1e-12);
        CHECK(three.amplitudes[i].real() == doctest::Approx(0.353553).epsilon(1e-5));
    }

    CHECK_THROWS_AS(encode::prepare_uniform_superposition(21), std::invalid_argument);
}

TEST_CASE("angle encoding examples") {
    // Rx(0) leaves |+> alone.
    const auto plus = encode::angle_encode({0.0}, encode::Axis::X);
    CHECK(std::abs(plus.amplitudes[0] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);
    CHECK(std::abs(plus.amplitudes[1] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);

    // Rz(pi)|+> = [-i, i]/sqrt(2), worked by hand from the Rz matrix.
    const auto phased = encode::angle_encode({kPi}, encode::Axis::Z);
    CHECK(std::abs(phased.amplitudes[0] - Complex{0.0, -1.0 / std::sqrt(2.0)}) < 1e-12);
    CHECK(std::abs(phased.amplitudes[1] - Complex{0.0, 1.0 / std::sqrt(2.0)}) < 1e-12);

    // Two qubits, axis Y: qubit 0 rotated by pi/2, qubit 1 left at |+>;
    // checked against the dense oracle, and the [p,p,q,q] probability shape.
    const auto two = encode::angle_encode({kPi / 2.0, 0.0}, encode::Axis::Y);
    auto expected = qsim::zero_state(2).amplitudes;
    expected = oracle::apply_dense(qsim::Gate::h(0), expected, 2);
    expected = oracle::apply_dense(qsim::Gate::h(1), expected, 2);
    expected = oracle::apply_dense(qsim::Gate::ry(0, kPi / 2.0), expected, 2);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(two.amplitudes[i] - expected[i]) < 1e-10);
    }
    const auto probs = qsim::probabilities(two);
    CHECK(probs[0] == doctest::Approx(probs[1]).epsilon(1e-12));
    CHECK(probs[2] == doctest::Approx(probs[3]).epsilon(1e-12));
    CHECK(probs[0] + probs[2] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(encode::angle_encode({std::nan("")}, encode::Axis::X), std::invalid_argument);
}

TEST_CASE("amplitude encoding examples") {
    const auto basis = encode::amplitude_encode({1.0, 0.0, 0.0, 0.0});
    CHECK(basis.n_qubits == 2);
    CHECK(std::abs(basis.amplitudes[0] - Complex{1.0, 0.0}) < 1e-12);

    const auto pair = encode::amplitude_encode({3.0, 4.0});
    CHECK(pair.n_qubits == 1);
    CHECK(pair.amplitudes[0].real() == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(pair.amplitudes[1].real() == doctest::Approx(0.8).epsilon(1e-12));

    // Pad-then-normalize: [1,1,1] -> [1,1,1,0]/sqrt(3).
    const auto padded = encode::amplitude_encode({1.0, 1.0, 1.0});
    CHECK(padded.n_qubits == 2);
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    CHECK(padded.amplitudes[0].real() == doctest::Approx(inv_sqrt3).epsilon(1e-12));
    CHECK(padded.amplitudes[1].real() == doctest::Approx(inv_sqrt3).epsilon(1e-12));
    CHECK(padded.amplitudes[2].real() == doctest::Approx(inv_sqrt3).epsilon(1e-12));
    CHECK(std::abs(padded.amplitudes[3]) < 1e-12);

    CHECK_THROWS_AS(encode::amplitude_encode({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(encode::amplitude_encode({}), std::invalid_argument);
}

TEST_CASE("every encoder output has unit norm") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> value(-8.0, 8.0);
    std::uniform_int_distribution<int> n_dist(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = n_dist(rng);
        std::vector<double> features(static_cast<std::size_t>(n));
        for (auto& f : features) {
            f = value(rng);
        }
        for (encode::Axis axis : {encode::Axis::X, encode::Axis::Y, encode::Axis::Z}) {
            CHECK(std::abs(qsim::state_norm(encode::angle_encode(features, axis)) - 1.0) <= 1e-10);
        }
        features[0] += 17.0; // keep the vector away from zero
        CHECK(std::abs(qsim::state_norm(encode::amplitude_encode(features)) - 1.0) <= 1e-10);
    }
}

TEST_CASE("angle encoding of all-zero features is exactly the uniform superposition") {
    for (int n = 1; n <= 4; ++n) {
        const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
        const auto uniform = encode::prepare_uniform_superposition(n);
        for (encode::Axis axis : {encode::Axis::X, encode::Axis::Y, encode::Axis::Z}) {
            const auto encoded = encode::angle_encode(zeros, axis);
            for (std::size_t i = 0; i < uniform.amplitudes.size(); ++i) {
                CHECK(encoded.amplitudes[i] == uniform.amplitudes[i]);
            }
        }
    }
}

TEST_CASE("amplitude encoding is scale invariant") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    std::uniform_real_distribution<double> scale(0.1, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> features(6);
        for (auto& f : features) {
            f = value(rng);
        }
        features[2] += 5.0;
        const double c = scale(rng);
        std::vector<double> scaled = features;
        for (auto& f : scaled) {
            f *= c;
        }
        const auto a = encode::amplitude_encode(features);
        const auto b = encode::amplitude_encode(scaled);
        for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
            CHECK(std::abs(a.amplitudes[i] - b.amplitudes[i]) <= 1e-10);
        }
    }
}

TEST_CASE("qubit-count law: n features on n qubits vs ceil(log2(n)) qubits") {
    for (int n = 1; n <= 6; ++n) {
        const std::vector<double> features(static_cast<std::size_t>(n), 0.5);
        CHECK(encode::angle_encode(features, encode::Axis::X).n_qubits == n);
        const auto amp = encode::amplitude_encode(features);
        int expected = 1;
        while ((1 << expected) < n) {
            ++expected;
        }
        CHECK(amp.n_qubits == expected);
    }
}

TEST_CASE("encode_features validates dimensions against the register") {
    CHECK_THROWS_AS(encode::encode_features({1.0, 2.0}, encode::Scheme::AngleRx, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(encode::encode_features({1.0, 2.0, 3.0}, encode::Scheme::Amplitude, 1),
                    std::invalid_argument);
    const auto state = encode::encode_features({1.0, 2.0, 3.0}, encode::Scheme::Amplitude, 2);
    CHECK(state.n_qubits == 2);
    CHECK(std::abs(qsim::state_norm(state) - 1.0) < 1e-12);
}

TEST_CASE("scheme names round trip") {
    for (encode::Scheme s : {encode::Scheme::AngleRx, encode::Scheme::AngleRy,
                             encode::Scheme::AngleRz, encode::Scheme::Amplitude}) {
        CHECK(encode::scheme_from_string(encode::to_string(s)) == s);
    }
    CHECK_THROWS_AS(encode::scheme_from_string("basis"), std::invalid_argument);
}
