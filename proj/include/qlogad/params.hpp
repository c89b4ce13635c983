#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qlogad/nn.hpp"

namespace qlogad::models {

/// One named trainable array. Vectors are stored as 1 x n.
struct ParamArray {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    nn::Vec value;
};

/// Flat registry of every trainable array in a model. Gradients live in a
/// separate GradBuffer so concurrent sample evaluations can accumulate into
/// private buffers and be reduced in a fixed order.
class ParamSet {
public:
    /// Adds a zero-initialized array and returns its id.
    std::size_t add(const std::string& name, std::size_t rows, std::size_t cols);

    /// Adds an array initialized uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)).
    std::size_t add_init(const std::string& name, std::size_t rows, std::size_t cols,
                         std::size_t fan_in, std::mt19937_64& rng);

    ParamArray& operator[](std::size_t id) { return arrays_[id]; }
    const ParamArray& operator[](std::size_t id) const { return arrays_[id]; }

    /// Id of the array with this exact name; throws when absent.
    std::size_t find(const std::string& name) const;

    std::size_t count() const { return arrays_.size(); }
    std::size_t total_values() const;

    nn::Tensor2 tensor(std::size_t id) const;
    const nn::Vec& vec(std::size_t id) const { return arrays_[id].value; }

    std::vector<nn::NamedArray> to_named_arrays(const std::string& prefix = "") const;
    /// Restores values by name match; throws if an array is missing or
    /// has a different shape.
    void load_named_arrays(const std::vector<nn::NamedArray>& arrays,
                           const std::string& prefix = "");

private:
    std::vector<ParamArray> arrays_;
};

/// Per-array gradient buffers aligned with a ParamSet.
class GradBuffer {
public:
    GradBuffer() = default;
    explicit GradBuffer(const ParamSet& params);

    void zero();
    nn::Vec& grad(std::size_t id) { return grads_[id]; }
    const nn::Vec& grad(std::size_t id) const { return grads_[id]; }
    std::size_t count() const { return grads_.size(); }

    void add(const GradBuffer& other);
    void scale(double factor);
    /// Joint L2 norm clip across every array; returns the pre-clip norm.
    double clip_global_norm(double max_norm);

private:
    std::vector<nn::Vec> grads_;
};

/// Adam over a whole ParamSet, one moment pair per array, shared step count.
class AdamOptimizer {
public:
    explicit AdamOptimizer(double lr) : lr_(lr) {}

    void step(ParamSet& params, const GradBuffer& grads);
    double learning_rate() const { return lr_; }

private:
    double lr_ = 1e-4;
    std::vector<nn::AdamState> states_;
};

} // namespace qlogad::models
