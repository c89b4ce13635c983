#include "qlogad/qlayer.hpp"

#include <cmath>
#include <stdexcept>

namespace qlogad::models {

QLayer QLayer::create(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                      std::size_t out_dim, const pqc::CircuitDesign& design,
                      std::mt19937_64& rng) {
    QLayer layer;
    layer.design_ = design;
    layer.in_dim_ = in_dim;
    layer.out_dim_ = out_dim;
    const auto n = static_cast<std::size_t>(design.n_qubits);
    layer.in_w_ = params.add_init(prefix + ".in_proj.w", in_dim, n, in_dim, rng);
    layer.in_b_ = params.add_init(prefix + ".in_proj.b", 1, n, in_dim, rng);
    layer.theta_ = params.add_init(prefix + ".theta", 1,
                                   static_cast<std::size_t>(design.parameter_count()), n, rng);
    layer.out_w_ = params.add_init(prefix + ".out_proj.w", n, out_dim, n, rng);
    layer.out_b_ = params.add_init(prefix + ".out_proj.b", 1, out_dim, n, rng);
    return layer;
}

nn::Vec QLayer::forward(const ParamSet& params, const nn::Vec& x, Cache* cache) const {
    if (x.size() != in_dim_) {
        throw std::invalid_argument("QLayer::forward: input width mismatch");
    }
    const nn::Vec features = nn::linear_forward(x, params.tensor(in_w_), params.vec(in_b_));
    const nn::Vec z = pqc::forward(design_, params.vec(theta_), features);
    nn::Vec out = nn::linear_forward(z, params.tensor(out_w_), params.vec(out_b_));
    if (cache) {
        cache->x = x;
        cache->features = features;
        cache->z = z;
    }
    return out;
}

nn::Vec QLayer::backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                         const nn::Vec& upstream) const {
    // Up-projection.
    const auto out_grads = nn::linear_backward(cache.z, params.tensor(out_w_), upstream);
    for (std::size_t i = 0; i < out_grads.w.data.size(); ++i) {
        grads.grad(out_w_)[i] += out_grads.w.data[i];
    }
    for (std::size_t i = 0; i < out_grads.b.size(); ++i) {
        grads.grad(out_b_)[i] += out_grads.b[i];
    }

    // Circuit parameters and encoded inputs, both via the shift rule
    // (finite differences for amplitude-encoded inputs).
    const nn::Vec& theta = params.vec(theta_);
    const nn::Vec d_theta = pqc::gradient_params(design_, theta, cache.features, out_grads.x);
    for (std::size_t i = 0; i < d_theta.size(); ++i) {
        grads.grad(theta_)[i] += d_theta[i];
    }
    const nn::Vec d_features = pqc::gradient_inputs(design_, theta, cache.features, out_grads.x);

    // Down-projection.
    const auto in_grads = nn::linear_backward(cache.x, params.tensor(in_w_), d_features);
    for (std::size_t i = 0; i < in_grads.w.data.size(); ++i) {
        grads.grad(in_w_)[i] += in_grads.w.data[i];
    }
    for (std::size_t i = 0; i < in_grads.b.size(); ++i) {
        grads.grad(in_b_)[i] += in_grads.b[i];
    }
    return in_grads.x;
}

GateMap GateMap::affine(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                        std::size_t out_dim, std::mt19937_64& rng) {
    AffineMap a;
    a.in_dim = in_dim;
    a.out_dim = out_dim;
    a.w = params.add_init(prefix + ".w", in_dim, out_dim, in_dim, rng);
    a.b = params.add_init(prefix + ".b", 1, out_dim, in_dim, rng);
    GateMap map;
    map.impl_ = a;
    return map;
}

GateMap GateMap::quantum(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                         std::size_t out_dim, const pqc::CircuitDesign& design,
                         std::mt19937_64& rng) {
    GateMap map;
    map.impl_ = QLayer::create(params, prefix, in_dim, out_dim, design, rng);
    return map;
}

nn::Vec GateMap::forward(const ParamSet& params, const nn::Vec& x, Cache* cache) const {
    if (const auto* a = std::get_if<AffineMap>(&impl_)) {
        if (cache) {
            cache->x = x;
            cache->quantum.reset();
        }
        return nn::linear_forward(x, params.tensor(a->w), params.vec(a->b));
    }
    const QLayer& layer = std::get<QLayer>(impl_);
    if (!cache) {
        return layer.forward(params, x);
    }
    cache->x = x;
    cache->quantum.emplace();
    return layer.forward(params, x, &*cache->quantum);
}

nn::Vec GateMap::backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                          const nn::Vec& upstream) const {
    if (const auto* a = std::get_if<AffineMap>(&impl_)) {
        const auto g = nn::linear_backward(cache.x, params.tensor(a->w), upstream);
        for (std::size_t i = 0; i < g.w.data.size(); ++i) {
            grads.grad(a->w)[i] += g.w.data[i];
        }
        for (std::size_t i = 0; i < g.b.size(); ++i) {
            grads.grad(a->b)[i] += g.b[i];
        }
        return g.x;
    }
    const QLayer& layer = std::get<QLayer>(impl_);
    if (!cache.quantum) {
        throw std::logic_error("GateMap::backward: missing quantum cache");
    }
    return layer.backward(params, grads, *cache.quantum, upstream);
}

std::size_t GateMap::out_dim() const {
    if (const auto* a = std::get_if<AffineMap>(&impl_)) {
        return a->out_dim;
    }
    return std::get<QLayer>(impl_).out_dim();
}

CellMaps CellMaps::affine(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                          std::size_t hidden, std::mt19937_64& rng) {
    const std::size_t z = in_dim + hidden;
    return {GateMap::affine(params, prefix + ".forget", z, hidden, rng),
            GateMap::affine(params, prefix + ".input", z, hidden, rng),
            GateMap::affine(params, prefix + ".update", z, hidden, rng),
            GateMap::affine(params, prefix + ".output", z, hidden, rng)};
}

CellMaps CellMaps::quantum(ParamSet& params, const std::string& prefix, std::size_t in_dim,
                           std::size_t hidden, const pqc::CircuitDesign& design,
                           std::mt19937_64& rng) {
    const std::size_t z = in_dim + hidden;
    return {GateMap::quantum(params, prefix + ".forget", z, hidden, design, rng),
            GateMap::quantum(params, prefix + ".input", z, hidden, design, rng),
            GateMap::quantum(params, prefix + ".update", z, hidden, design, rng),
            GateMap::quantum(params, prefix + ".output", z, hidden, design, rng)};
}

int CellMaps::qubit_count() const {
    int total = 0;
    for (const GateMap* map : {&forget, &input, &update, &output}) {
        if (const QLayer* layer = map->qlayer()) {
            total += layer->design().n_qubits;
        }
    }
    return total;
}

CellState cell_forward(const ParamSet& params, const CellMaps& maps, const nn::Vec& x,
                       const nn::Vec& h_prev, const nn::Vec& c_prev, CellCache* cache) {
    nn::Vec z;
    z.reserve(h_prev.size() + x.size());
    z.insert(z.end(), h_prev.begin(), h_prev.end());
    z.insert(z.end(), x.begin(), x.end());

    GateMap::Cache fc, ic, uc, oc;
    const nn::Vec f = nn::sigmoid(maps.forget.forward(params, z, cache ? &fc : nullptr));
    const nn::Vec i = nn::sigmoid(maps.input.forward(params, z, cache ? &ic : nullptr));
    const nn::Vec c_bar = nn::tanh_vec(maps.update.forward(params, z, cache ? &uc : nullptr));
    const nn::Vec o = nn::sigmoid(maps.output.forward(params, z, cache ? &oc : nullptr));
    if (f.size() != c_prev.size()) {
        throw std::invalid_argument("cell_forward: hidden width mismatch");
    }

    nn::Vec c(c_prev.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] = f[j] * c_prev[j] + i[j] * c_bar[j];
    }
    const nn::Vec tanh_c = nn::tanh_vec(c);
    nn::Vec h(c.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        h[j] = o[j] * tanh_c[j];
    }
    if (cache) {
        cache->forget = std::move(fc);
        cache->input = std::move(ic);
        cache->update = std::move(uc);
        cache->output = std::move(oc);
        cache->f = f;
        cache->i = i;
        cache->c_bar = c_bar;
        cache->o = o;
        cache->c_prev = c_prev;
        cache->c = c;
        cache->tanh_c = tanh_c;
    }
    return {std::move(h), std::move(c)};
}

CellInputGrads cell_backward(const ParamSet& params, const CellMaps& maps, GradBuffer& grads,
                             const CellCache& cache, const nn::Vec& dh, const nn::Vec& dc) {
    const std::size_t hidden = cache.f.size();
    nn::Vec dc_total(hidden), da_f(hidden), da_i(hidden), da_c(hidden), da_o(hidden);
    CellInputGrads out;
    out.c_prev.assign(hidden, 0.0);
    for (std::size_t j = 0; j < hidden; ++j) {
        const double d_o = dh[j] * cache.tanh_c[j];
        dc_total[j] = dc[j] + dh[j] * cache.o[j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
        out.c_prev[j] = dc_total[j] * cache.f[j];
        da_f[j] = dc_total[j] * cache.c_prev[j] * cache.f[j] * (1.0 - cache.f[j]);
        da_i[j] = dc_total[j] * cache.c_bar[j] * cache.i[j] * (1.0 - cache.i[j]);
        da_c[j] = dc_total[j] * cache.i[j] * (1.0 - cache.c_bar[j] * cache.c_bar[j]);
        da_o[j] = d_o * cache.o[j] * (1.0 - cache.o[j]);
    }

    const nn::Vec dz_f = maps.forget.backward(params, grads, cache.forget, da_f);
    const nn::Vec dz_i = maps.input.backward(params, grads, cache.input, da_i);
    const nn::Vec dz_c = maps.update.backward(params, grads, cache.update, da_c);
    const nn::Vec dz_o = maps.output.backward(params, grads, cache.output, da_o);

    nn::Vec dz(dz_f.size());
    for (std::size_t k = 0; k < dz.size(); ++k) {
        dz[k] = dz_f[k] + dz_i[k] + dz_c[k] + dz_o[k];
    }
    out.h_prev.assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(hidden));
    out.x.assign(dz.begin() + static_cast<std::ptrdiff_t>(hidden), dz.end());
    return out;
}

CellState qlstm_cell(const ParamSet& params, const CellMaps& maps, const nn::Vec& x,
                     const nn::Vec& h_prev, const nn::Vec& c_prev, CellCache* cache) {
    return cell_forward(params, maps, x, h_prev, c_prev, cache);
}

QAttention QAttention::quantum(ParamSet& params, const std::string& prefix, std::size_t dim,
                               const pqc::CircuitDesign& design, std::mt19937_64& rng,
                               bool share_register) {
    QAttention attn;
    attn.query = GateMap::quantum(params, prefix + ".q", dim, dim, design, rng);
    attn.key = GateMap::quantum(params, prefix + ".k", dim, dim, design, rng);
    attn.value = GateMap::quantum(params, prefix + ".v", dim, dim, design, rng);
    attn.d_k = dim;
    attn.share_register = share_register;
    return attn;
}

QAttention QAttention::affine(ParamSet& params, const std::string& prefix, std::size_t dim,
                              std::mt19937_64& rng) {
    QAttention attn;
    attn.query = GateMap::affine(params, prefix + ".q", dim, dim, rng);
    attn.key = GateMap::affine(params, prefix + ".k", dim, dim, rng);
    attn.value = GateMap::affine(params, prefix + ".v", dim, dim, rng);
    attn.d_k = dim;
    return attn;
}

nn::Tensor2 QAttention::forward(const ParamSet& params, const nn::Tensor2& x, Cache* cache) const {
    const std::size_t k_rows = x.rows;
    nn::Tensor2 q(k_rows, d_k), k(k_rows, d_k), v(k_rows, d_k);
    if (cache) {
        cache->q_rows.resize(k_rows);
        cache->k_rows.resize(k_rows);
        cache->v_rows.resize(k_rows);
    }
    for (std::size_t r = 0; r < k_rows; ++r) {
        nn::Vec row(x.data.begin() + static_cast<std::ptrdiff_t>(r * x.cols),
                    x.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * x.cols));
        const nn::Vec qr = query.forward(params, row, cache ? &cache->q_rows[r] : nullptr);
        const nn::Vec kr = key.forward(params, row, cache ? &cache->k_rows[r] : nullptr);
        const nn::Vec vr = value.forward(params, row, cache ? &cache->v_rows[r] : nullptr);
        for (std::size_t c = 0; c < d_k; ++c) {
            q.at(r, c) = qr[c];
            k.at(r, c) = kr[c];
            v.at(r, c) = vr[c];
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    nn::Tensor2 weights(k_rows, k_rows);
    for (std::size_t r = 0; r < k_rows; ++r) {
        nn::Vec scores(k_rows);
        for (std::size_t c = 0; c < k_rows; ++c) {
            double dot = 0.0;
            for (std::size_t d = 0; d < d_k; ++d) {
                dot += q.at(r, d) * k.at(c, d);
            }
            scores[c] = dot * scale;
        }
        const nn::Vec row = nn::softmax(scores);
        for (std::size_t c = 0; c < k_rows; ++c) {
            weights.at(r, c) = row[c];
        }
    }

    nn::Tensor2 out(k_rows, d_k);
    for (std::size_t r = 0; r < k_rows; ++r) {
        for (std::size_t c = 0; c < k_rows; ++c) {
            const double w = weights.at(r, c);
            for (std::size_t d = 0; d < d_k; ++d) {
                out.at(r, d) += w * v.at(c, d);
            }
        }
    }
    if (cache) {
        cache->q = q;
        cache->k = k;
        cache->v = v;
        cache->weights = weights;
    }
    return out;
}

nn::Tensor2 QAttention::backward(const ParamSet& params, GradBuffer& grads, const Cache& cache,
                                 const nn::Tensor2& x, const nn::Tensor2& upstream) const {
    const std::size_t k_rows = x.rows;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));

    // d out = d(weights . V)
    nn::Tensor2 dv(k_rows, d_k), d_weights(k_rows, k_rows);
    for (std::size_t r = 0; r < k_rows; ++r) {
        for (std::size_t c = 0; c < k_rows; ++c) {
            double acc = 0.0;
            for (std::size_t d = 0; d < d_k; ++d) {
                acc += upstream.at(r, d) * cache.v.at(c, d);
                dv.at(c, d) += cache.weights.at(r, c) * upstream.at(r, d);
            }
            d_weights.at(r, c) = acc;
        }
    }

    // Row-wise softmax backward, then into Q and K.
    nn::Tensor2 dq(k_rows, d_k), dk(k_rows, d_k);
    for (std::size_t r = 0; r < k_rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < k_rows; ++c) {
            dot += cache.weights.at(r, c) * d_weights.at(r, c);
        }
        for (std::size_t c = 0; c < k_rows; ++c) {
            const double ds = cache.weights.at(r, c) * (d_weights.at(r, c) - dot) * scale;
            for (std::size_t d = 0; d < d_k; ++d) {
                dq.at(r, d) += ds * cache.k.at(c, d);
                dk.at(c, d) += ds * cache.q.at(r, d);
            }
        }
    }

    nn::Tensor2 dx(k_rows, x.cols);
    for (std::size_t r = 0; r < k_rows; ++r) {
        nn::Vec dq_row(d_k), dk_row(d_k), dv_row(d_k);
        for (std::size_t d = 0; d < d_k; ++d) {
            dq_row[d] = dq.at(r, d);
            dk_row[d] = dk.at(r, d);
            dv_row[d] = dv.at(r, d);
        }
        const nn::Vec dx_q = query.backward(params, grads, cache.q_rows[r], dq_row);
        const nn::Vec dx_k = key.backward(params, grads, cache.k_rows[r], dk_row);
        const nn::Vec dx_v = value.backward(params, grads, cache.v_rows[r], dv_row);
        for (std::size_t c = 0; c < x.cols; ++c) {
            dx.at(r, c) = dx_q[c] + dx_k[c] + dx_v[c];
        }
    }
    return dx;
}

int QAttention::qubit_count() const {
    const QLayer* q = query.qlayer();
    if (!q) {
        return 0;
    }
    // Shared mode runs Q, K and V sequentially on one register.
    return share_register ? q->design().n_qubits : 3 * q->design().n_qubits;
}

} // namespace qlogad::models
