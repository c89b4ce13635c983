#include "qlogad/params.hpp"

#include <cmath>
#include <stdexcept>

namespace qlogad::models {

std::size_t ParamSet::add(const std::string& name, std::size_t rows, std::size_t cols) {
    ParamArray array;
    array.name = name;
    array.rows = rows;
    array.cols = cols;
    array.value.assign(rows * cols, 0.0);
    arrays_.push_back(std::move(array));
    return arrays_.size() - 1;
}

std::size_t ParamSet::add_init(const std::string& name, std::size_t rows, std::size_t cols,
                               std::size_t fan_in, std::mt19937_64& rng) {
    const std::size_t id = add(name, rows, cols);
    nn::init_uniform(arrays_[id].value, fan_in, rng);
    return id;
}

std::size_t ParamSet::find(const std::string& name) const {
    for (std::size_t id = 0; id < arrays_.size(); ++id) {
        if (arrays_[id].name == name) {
            return id;
        }
    }
    throw std::invalid_argument("ParamSet: no array named " + name);
}

std::size_t ParamSet::total_values() const {
    std::size_t total = 0;
    for (const ParamArray& a : arrays_) {
        total += a.value.size();
    }
    return total;
}

nn::Tensor2 ParamSet::tensor(std::size_t id) const {
    const ParamArray& a = arrays_[id];
    nn::Tensor2 t(a.rows, a.cols);
    t.data = a.value;
    return t;
}

std::vector<nn::NamedArray> ParamSet::to_named_arrays(const std::string& prefix) const {
    std::vector<nn::NamedArray> out;
    out.reserve(arrays_.size());
    for (const ParamArray& a : arrays_) {
        out.push_back({prefix + a.name, a.rows, a.cols, a.value});
    }
    return out;
}

void ParamSet::load_named_arrays(const std::vector<nn::NamedArray>& arrays,
                                 const std::string& prefix) {
    for (ParamArray& a : arrays_) {
        const std::string wanted = prefix + a.name;
        bool found = false;
        for (const nn::NamedArray& source : arrays) {
            if (source.name != wanted) {
                continue;
            }
            if (source.rows != a.rows || source.cols != a.cols) {
                throw std::runtime_error("checkpoint array " + wanted + " has shape " +
                                         std::to_string(source.rows) + "x" +
                                         std::to_string(source.cols) + ", expected " +
                                         std::to_string(a.rows) + "x" + std::to_string(a.cols));
            }
            a.value = source.values;
            found = true;
            break;
        }
        if (!found) {
            throw std::runtime_error("checkpoint is missing array " + wanted);
        }
    }
}

GradBuffer::GradBuffer(const ParamSet& params) {
    grads_.resize(params.count());
    for (std::size_t id = 0; id < params.count(); ++id) {
        grads_[id].assign(params[id].value.size(), 0.0);
    }
}

void GradBuffer::zero() {
    for (nn::Vec& g : grads_) {
        std::fill(g.begin(), g.end(), 0.0);
    }
}

void GradBuffer::add(const GradBuffer& other) {
    if (other.grads_.size() != grads_.size()) {
        throw std::invalid_argument("GradBuffer::add: buffer shape mismatch");
    }
    for (std::size_t id = 0; id < grads_.size(); ++id) {
        for (std::size_t i = 0; i < grads_[id].size(); ++i) {
            grads_[id][i] += other.grads_[id][i];
        }
    }
}

void GradBuffer::scale(double factor) {
    for (nn::Vec& g : grads_) {
        for (double& v : g) {
            v *= factor;
        }
    }
}

double GradBuffer::clip_global_norm(double max_norm) {
    std::vector<nn::Vec*> views;
    views.reserve(grads_.size());
    for (nn::Vec& g : grads_) {
        views.push_back(&g);
    }
    return nn::clip_global_norm(views, max_norm);
}

void AdamOptimizer::step(ParamSet& params, const GradBuffer& grads) {
    if (grads.count() != params.count()) {
        throw std::invalid_argument("AdamOptimizer::step: gradient buffer mismatch");
    }
    if (states_.empty()) {
        states_.resize(params.count());
    }
    for (std::size_t id = 0; id < params.count(); ++id) {
        nn::adam_step(params[id].value, grads.grad(id), states_[id], lr_);
    }
}

} // namespace qlogad::models
