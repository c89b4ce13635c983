#include "qlogad/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace qlogad::nn {

namespace {

void check_linear_dims(const Vec& x, const Tensor2& w, std::size_t b_size) {
    if (x.size() != w.rows || b_size != w.cols) {
        throw std::invalid_argument("linear layer dimension mismatch: x=" +
                                    std::to_string(x.size()) + " W=" + std::to_string(w.rows) +
                                    "x" + std::to_string(w.cols) + " b=" + std::to_string(b_size));
    }
}

} // namespace

Vec linear_forward(const Vec& x, const Tensor2& w, const Vec& b) {
    check_linear_dims(x, w, b.size());
    Vec y = b;
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double xr = x[r];
        const double* row = &w.data[r * w.cols];
        for (std::size_t c = 0; c < w.cols; ++c) {
            y[c] += xr * row[c];
        }
    }
    return y;
}

LinearGrads linear_backward(const Vec& x, const Tensor2& w, const Vec& upstream) {
    check_linear_dims(x, w, upstream.size());
    LinearGrads g;
    g.x.assign(x.size(), 0.0);
    g.w = Tensor2(w.rows, w.cols);
    g.b = upstream;
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wrow = &w.data[r * w.cols];
        double* grow = &g.w.data[r * w.cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) {
            acc += wrow[c] * upstream[c];
            grow[c] = x[r] * upstream[c];
        }
        g.x[r] = acc;
    }
    return g;
}

Vec sigmoid(const Vec& x) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = 1.0 / (1.0 + std::exp(-x[i]));
    }
    return y;
}

Vec tanh_vec(const Vec& x) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = std::tanh(x[i]);
    }
    return y;
}

Vec softmax(const Vec& x) {
    if (x.empty()) {
        throw std::invalid_argument("softmax of an empty vector");
    }
    const double peak = *std::max_element(x.begin(), x.end());
    Vec y(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = std::exp(x[i] - peak);
        total += y[i];
    }
    for (double& v : y) {
        v /= total;
    }
    return y;
}

Vec sigmoid_backward(const Vec& y, const Vec& upstream) {
    Vec dx(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        dx[i] = upstream[i] * y[i] * (1.0 - y[i]);
    }
    return dx;
}

Vec tanh_backward(const Vec& y, const Vec& upstream) {
    Vec dx(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        dx[i] = upstream[i] * (1.0 - y[i] * y[i]);
    }
    return dx;
}

Vec softmax_backward(const Vec& y, const Vec& upstream) {
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        dot += y[i] * upstream[i];
    }
    Vec dx(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        dx[i] = y[i] * (upstream[i] - dot);
    }
    return dx;
}

std::pair<double, Vec> softmax_cross_entropy(const Vec& logits, std::size_t target) {
    if (target >= logits.size()) {
        throw std::invalid_argument("softmax_cross_entropy: target " + std::to_string(target) +
                                    " out of range for " + std::to_string(logits.size()) +
                                    " classes");
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double v : logits) {
        total += std::exp(v - peak);
    }
    const double log_sum = peak + std::log(total);
    const double loss = log_sum - logits[target];
    Vec grad(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        grad[i] = std::exp(logits[i] - log_sum);
    }
    grad[target] -= 1.0;
    return {loss, std::move(grad)};
}

std::pair<double, double> binary_cross_entropy(double p, int label) {
    constexpr double eps = 1e-7;
    const double q = std::clamp(p, eps, 1.0 - eps);
    const double y = label ? 1.0 : 0.0;
    const double loss = -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
    const double grad = (q - y) / (q * (1.0 - q));
    return {loss, grad};
}

void adam_step(Vec& params, const Vec& grads, AdamState& state, double lr) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient shape mismatch");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: optimizer state shape mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

LstmWeights make_lstm_weights(std::size_t input_size, std::size_t hidden_size) {
    LstmWeights w;
    const std::size_t z = input_size + hidden_size;
    w.w_forget = Tensor2(z, hidden_size);
    w.w_input = Tensor2(z, hidden_size);
    w.w_cell = Tensor2(z, hidden_size);
    w.w_output = Tensor2(z, hidden_size);
    w.b_forget.assign(hidden_size, 0.0);
    w.b_input.assign(hidden_size, 0.0);
    w.b_cell.assign(hidden_size, 0.0);
    w.b_output.assign(hidden_size, 0.0);
    return w;
}

LstmOutput lstm_cell(const Vec& x, const Vec& h_prev, const Vec& c_prev, const LstmWeights& w,
                     LstmCache* cache) {
    const std::size_t hidden = w.hidden_size();
    if (h_prev.size() != hidden || c_prev.size() != hidden) {
        throw std::invalid_argument("lstm_cell: state dimension mismatch");
    }
    Vec z;
    z.reserve(h_prev.size() + x.size());
    z.insert(z.end(), h_prev.begin(), h_prev.end());
    z.insert(z.end(), x.begin(), x.end());

    const Vec f = sigmoid(linear_forward(z, w.w_forget, w.b_forget));
    const Vec i = sigmoid(linear_forward(z, w.w_input, w.b_input));
    const Vec c_bar = tanh_vec(linear_forward(z, w.w_cell, w.b_cell));
    const Vec o = sigmoid(linear_forward(z, w.w_output, w.b_output));

    Vec c(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        c[j] = f[j] * c_prev[j] + i[j] * c_bar[j];
    }
    const Vec tanh_c = tanh_vec(c);
    Vec h(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        h[j] = o[j] * tanh_c[j];
    }
    if (cache) {
        cache->z = std::move(z);
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

LstmGrads lstm_cell_backward(const LstmWeights& w, const LstmCache& cache, const Vec& dh,
                             const Vec& dc) {
    const std::size_t hidden = w.hidden_size();

    Vec dc_total(hidden), d_o(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        d_o[j] = dh[j] * cache.tanh_c[j];
        dc_total[j] = dc[j] + dh[j] * cache.o[j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
    }

    Vec da_f(hidden), da_i(hidden), da_c(hidden), da_o(hidden);
    LstmGrads g;
    g.c_prev.assign(hidden, 0.0);
    for (std::size_t j = 0; j < hidden; ++j) {
        g.c_prev[j] = dc_total[j] * cache.f[j];
        da_f[j] = dc_total[j] * cache.c_prev[j] * cache.f[j] * (1.0 - cache.f[j]);
        da_i[j] = dc_total[j] * cache.c_bar[j] * cache.i[j] * (1.0 - cache.i[j]);
        da_c[j] = dc_total[j] * cache.i[j] * (1.0 - cache.c_bar[j] * cache.c_bar[j]);
        da_o[j] = d_o[j] * cache.o[j] * (1.0 - cache.o[j]);
    }

    auto gf = linear_backward(cache.z, w.w_forget, da_f);
    auto gi = linear_backward(cache.z, w.w_input, da_i);
    auto gc = linear_backward(cache.z, w.w_cell, da_c);
    auto go = linear_backward(cache.z, w.w_output, da_o);

    g.w.w_forget = std::move(gf.w);
    g.w.b_forget = std::move(gf.b);
    g.w.w_input = std::move(gi.w);
    g.w.b_input = std::move(gi.b);
    g.w.w_cell = std::move(gc.w);
    g.w.b_cell = std::move(gc.b);
    g.w.w_output = std::move(go.w);
    g.w.b_output = std::move(go.b);

    Vec dz(cache.z.size(), 0.0);
    for (std::size_t k = 0; k < dz.size(); ++k) {
        dz[k] = gf.x[k] + gi.x[k] + gc.x[k] + go.x[k];
    }
    g.h_prev.assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(hidden));
    g.x.assign(dz.begin() + static_cast<std::ptrdiff_t>(hidden), dz.end());
    return g;
}

namespace {

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("matmul dimension mismatch");
    }
    Tensor2 out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                out.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return out;
}

// a^T . b
Tensor2 matmul_ta(const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows) {
        throw std::invalid_argument("matmul_ta dimension mismatch");
    }
    Tensor2 out(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = a.at(k, i);
            for (std::size_t j = 0; j < b.cols; ++j) {
                out.at(i, j) += aki * b.at(k, j);
            }
        }
    }
    return out;
}

// a . b^T
Tensor2 matmul_tb(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.cols) {
        throw std::invalid_argument("matmul_tb dimension mismatch");
    }
    Tensor2 out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) {
                acc += a.at(i, k) * b.at(j, k);
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

} // namespace

Tensor2 scaled_dot_attention(const Tensor2& x, const Tensor2& wq, const Tensor2& wk,
                             const Tensor2& wv, AttentionCache* cache) {
    if (x.cols != wq.rows || x.cols != wk.rows || x.cols != wv.rows || wq.cols != wk.cols) {
        throw std::invalid_argument("scaled_dot_attention dimension mismatch");
    }
    const Tensor2 q = matmul(x, wq);
    const Tensor2 k = matmul(x, wk);
    const Tensor2 v = matmul(x, wv);
    const double scale = 1.0 / std::sqrt(static_cast<double>(wq.cols));

    Tensor2 weights = matmul_tb(q, k);
    for (std::size_t r = 0; r < weights.rows; ++r) {
        Vec row(weights.data.begin() + static_cast<std::ptrdiff_t>(r * weights.cols),
                weights.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * weights.cols));
        for (double& s : row) {
            s *= scale;
        }
        row = softmax(row);
        std::copy(row.begin(), row.end(),
                  weights.data.begin() + static_cast<std::ptrdiff_t>(r * weights.cols));
    }
    Tensor2 out = matmul(weights, v);
    if (cache) {
        cache->q = q;
        cache->k = k;
        cache->v = v;
        cache->weights = weights;
    }
    return out;
}

AttentionGrads scaled_dot_attention_backward(const Tensor2& x, const Tensor2& wq,
                                             const Tensor2& wk, const Tensor2& wv,
                                             const AttentionCache& cache,
                                             const Tensor2& upstream) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(wq.cols));

    const Tensor2 dv = matmul_ta(cache.weights, upstream);
    const Tensor2 d_weights = matmul_tb(upstream, cache.v);

    // Row-wise softmax backward on the attention weights.
    Tensor2 d_scores(d_weights.rows, d_weights.cols);
    for (std::size_t r = 0; r < d_weights.rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < d_weights.cols; ++c) {
            dot += cache.weights.at(r, c) * d_weights.at(r, c);
        }
        for (std::size_t c = 0; c < d_weights.cols; ++c) {
            d_scores.at(r, c) = cache.weights.at(r, c) * (d_weights.at(r, c) - dot) * scale;
        }
    }

    const Tensor2 dq = matmul(d_scores, cache.k);
    const Tensor2 dk = matmul_ta(d_scores, cache.q);

    AttentionGrads g;
    g.wq = matmul_ta(x, dq);
    g.wk = matmul_ta(x, dk);
    g.wv = matmul_ta(x, dv);
    g.x = matmul_tb(dq, wq);
    const Tensor2 dx_k = matmul_tb(dk, wk);
    const Tensor2 dx_v = matmul_tb(dv, wv);
    for (std::size_t i = 0; i < g.x.data.size(); ++i) {
        g.x.data[i] += dx_k.data[i] + dx_v.data[i];
    }
    return g;
}

void init_uniform(Vec& values, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : values) {
        v = dist(rng);
    }
}

double clip_global_norm(const std::vector<Vec*>& grads, double max_norm) {
    double sum_sq = 0.0;
    for (const Vec* g : grads) {
        for (double v : *g) {
            sum_sq += v * v;
        }
    }
    const double norm = std::sqrt(sum_sq);
    if (norm > max_norm && norm > 0.0) {
        const double factor = max_norm / norm;
        for (Vec* g : grads) {
            for (double& v : *g) {
                v *= factor;
            }
        }
    }
    return norm;
}

namespace {

constexpr char kMagic[] = "QLCK1\n";

template <typename T>
void write_raw(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw std::runtime_error("checkpoint: truncated file");
    }
    return value;
}

} // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    }
    out.write(kMagic, sizeof(kMagic) - 1);
    write_raw<std::uint64_t>(out, arrays.size());
    for (const NamedArray& a : arrays) {
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
        out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
        write_raw<std::uint64_t>(out, a.rows);
        write_raw<std::uint64_t>(out, a.cols);
        if (a.values.size() != a.rows * a.cols) {
            throw std::invalid_argument("checkpoint: shape does not match value count for " +
                                        a.name);
        }
        out.write(reinterpret_cast<const char*>(a.values.data()),
                  static_cast<std::streamsize>(a.values.size() * sizeof(double)));
    }
    if (!out) {
        throw std::runtime_error("checkpoint: write failed for " + path);
    }
}

std::vector<NamedArray> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open " + path);
    }
    char magic[sizeof(kMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, sizeof(magic)) != std::string(kMagic, sizeof(magic))) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    const auto count = read_raw<std::uint64_t>(in);
    std::vector<NamedArray> arrays;
    arrays.reserve(count);
    for (std::uint64_t n = 0; n < count; ++n) {
        NamedArray a;
        const auto name_len = read_raw<std::uint32_t>(in);
        a.name.resize(name_len);
        in.read(a.name.data(), name_len);
        a.rows = read_raw<std::uint64_t>(in);
        a.cols = read_raw<std::uint64_t>(in);
        a.values.resize(a.rows * a.cols);
        in.read(reinterpret_cast<char*>(a.values.data()),
                static_cast<std::streamsize>(a.values.size() * sizeof(double)));
        if (!in) {
            throw std::runtime_error("checkpoint: truncated array " + a.name);
        }
        arrays.push_back(std::move(a));
    }
    return arrays;
}

} // namespace qlogad::nn
