#pragma once

#include <optional>
#include <variant>

#include "qlogad/nn.hpp"
#include "qlogad/params.hpp"
#include "qlogad/pqc.hpp"

namespace qlogad::models {

/// Quantum replacement for an affine map: linear down-projection to one
/// value per qubit, state encoding, the parameterized circuit, per-qubit Z
/// readout, then linear up-projection to the output width.
class QLayer {
public:
    static QLayer create(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                         std::size_t out_dim, const pqc::CircuitDesign& design,
                         std::mt19937_64& rng);

    struct Cache {
        nn::Vec x;
        nn::Vec features; // in-projection output, one entry per qubit
        nn::Vec z;        // circuit readout
    };

    nn::Vec forward(const ParamSet& params, const nn::Vec& x, Cache* cache = nullptr) const;

    /// Chains out-projection, parameter-shift circuit gradients, and
    /// in-projection; accumulates into `grads` and returns d loss / d x.
    nn::Vec backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                     const nn::Vec& upstream) const;

    const pqc::CircuitDesign& design() const { return design_; }
    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }

private:
    pqc::CircuitDesign design_;
    std::size_t in_dim_ = 0;
    std::size_t out_dim_ = 0;
    std::size_t in_w_ = 0, in_b_ = 0, theta_ = 0, out_w_ = 0, out_b_ = 0;
};

/// Classical affine map as ParamSet ids.
struct AffineMap {
    std::size_t w = 0;
    std::size_t b = 0;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

/// Either a classical affine map or a QLayer, behind one forward/backward
/// contract so cells and heads can mix freely.
class GateMap {
public:
    struct Cache {
        nn::Vec x;
        std::optional<QLayer::Cache> quantum;
    };

    static GateMap affine(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                          std::size_t out_dim, std::mt19937_64& rng);
    static GateMap quantum(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                           std::size_t out_dim, const pqc::CircuitDesign& design,
                           std::mt19937_64& rng);

    nn::Vec forward(const ParamSet& params, const nn::Vec& x, Cache* cache = nullptr) const;
    nn::Vec backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                     const nn::Vec& upstream) const;

    bool is_quantum() const { return std::holds_alternative<QLayer>(impl_); }
    const QLayer* qlayer() const { return std::get_if<QLayer>(&impl_); }
    std::size_t out_dim() const;

private:
    std::variant<AffineMap, QLayer> impl_;
};

/// The four gate transforms of one LSTM cell. Classical cells use affine
/// maps; quantum cells use the input/update/forget/output QLayers.
struct CellMaps {
    GateMap forget, input, update, output;

    static CellMaps affine(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                           std::size_t hidden, std::mt19937_64& rng);
    static CellMaps quantum(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                            std::size_t hidden, const pqc::CircuitDesign& design,
                            std::mt19937_64& rng);

    int qubit_count() const;
};

struct CellCache {
    GateMap::Cache forget, input, update, output;
    nn::Vec f, i, c_bar, o;
    nn::Vec c_prev, c, tanh_c;
};

struct CellState {
    nn::Vec h;
    nn::Vec c;
};

/// LSTM recurrence with the gate preactivations produced by the four maps.
CellState cell_forward(const ParamSet& params, const CellMaps& maps, const nn::Vec& x,
                       const nn::Vec& h_prev, const nn::Vec& c_prev, CellCache* cache = nullptr);

struct CellInputGrads {
    nn::Vec x;
    nn::Vec h_prev;
    nn::Vec c_prev;
};

CellInputGrads cell_backward(const ParamSet& params, const CellMaps& maps, GradBuffer& grads,
                             const CellCache& cache, const nn::Vec& dh, const nn::Vec& dc);

/// QLSTM cell per the four named QLayers; thin wrapper over cell_forward.
CellState qlstm_cell(const ParamSet& params, const CellMaps& maps, const nn::Vec& x,
                     const nn::Vec& h_prev, const nn::Vec& c_prev, CellCache* cache = nullptr);

/// Attention with Q/K/V computed row-wise by three maps (affine or QLayer);
/// softmax(Q K^T / sqrt(d_k)) V is unchanged.
struct QAttention {
    GateMap query, key, value;
    std::size_t d_k = 0;
    bool share_register = true; // one register reused across Q/K/V, or three

    static QAttention quantum(ParamSet& params, const std::string& prefix, std::size_t dim,
                              const pqc::CircuitDesign& design, std::mt19937_64& rng,
                              bool share_register = true);
    static QAttention affine(ParamSet& params, const std::string& prefix, std::size_t dim,
                             std::mt19937_64& rng);

    struct Cache {
        std::vector<GateMap::Cache> q_rows, k_rows, v_rows;
        nn::Tensor2 q, k, v;
        nn::Tensor2 weights;
    };

    nn::Tensor2 forward(const ParamSet& params, const nn::Tensor2& x, Cache* cache = nullptr) const;
    nn::Tensor2 backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                         const nn::Tensor2& x, const nn::Tensor2& upstream) const;

    int qubit_count() const;
};

} // namespace qlogad::models
