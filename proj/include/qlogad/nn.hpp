#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qlogad::nn {

using Vec = std::vector<double>;

/// Row-major dense matrix. With y = x . W, rows(W) is the input width.
struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
};

// ---- basic layers -------------------------------------------------------

/// y = x . W + b
Vec linear_forward(const Vec& x, const Tensor2& w, const Vec& b);

struct LinearGrads {
    Vec x;
    Tensor2 w;
    Vec b;
};
LinearGrads linear_backward(const Vec& x, const Tensor2& w, const Vec& upstream);

Vec sigmoid(const Vec& x);
Vec tanh_vec(const Vec& x);
Vec softmax(const Vec& x);

// Backward passes take the forward *outputs*, which is all these need.
Vec sigmoid_backward(const Vec& y, const Vec& upstream);
Vec tanh_backward(const Vec& y, const Vec& upstream);
Vec softmax_backward(const Vec& y, const Vec& upstream);

// ---- losses -------------------------------------------------------------

/// Returns (loss, d loss / d logits). Loss is -log softmax(logits)[target].
std::pair<double, Vec> softmax_cross_entropy(const Vec& logits, std::size_t target);

/// Returns (loss, d loss / d p); p is clamped to [1e-7, 1 - 1e-7] first.
std::pair<double, double> binary_cross_entropy(double p, int label);

// ---- optimizer ----------------------------------------------------------

struct AdamState {
    std::size_t step = 0;
    Vec m;
    Vec v;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update, in place. Lazily sizes the moment
/// buffers on first use.
void adam_step(Vec& params, const Vec& grads, AdamState& state, double lr);

// ---- LSTM cell ----------------------------------------------------------

/// Gate weights act on the concatenation [h_prev, x]; each W is
/// (hidden + input) x hidden.
struct LstmWeights {
    Tensor2 w_forget, w_input, w_cell, w_output;
    Vec b_forget, b_input, b_cell, b_output;

    std::size_t hidden_size() const { return b_forget.size(); }
};

LstmWeights make_lstm_weights(std::size_t input_size, std::size_t hidden_size);

struct LstmCache {
    Vec z;       // [h_prev, x]
    Vec f, i, c_bar, o;
    Vec c_prev, c, tanh_c;
};

struct LstmOutput {
    Vec h;
    Vec c;
};

LstmOutput lstm_cell(const Vec& x, const Vec& h_prev, const Vec& c_prev, const LstmWeights& w,
                     LstmCache* cache = nullptr);

struct LstmGrads {
    LstmWeights w; // reused as a gradient holder, same shapes
    Vec x, h_prev, c_prev;
};

LstmGrads lstm_cell_backward(const LstmWeights& w, const LstmCache& cache, const Vec& dh,
                             const Vec& dc);

// ---- scaled dot-product attention ----------------------------------------

struct AttentionCache {
    Tensor2 q, k, v;
    Tensor2 weights; // softmax(Q K^T / sqrt(d_k)), rows sum to 1
};

/// softmax(X Wq (X Wk)^T / sqrt(d_k)) . (X Wv)
Tensor2 scaled_dot_attention(const Tensor2& x, const Tensor2& wq, const Tensor2& wk,
                             const Tensor2& wv, AttentionCache* cache = nullptr);

struct AttentionGrads {
    Tensor2 x, wq, wk, wv;
};

AttentionGrads scaled_dot_attention_backward(const Tensor2& x, const Tensor2& wq,
                                             const Tensor2& wk, const Tensor2& wv,
                                             const AttentionCache& cache,
                                             const Tensor2& upstream);

// ---- utilities ------------------------------------------------------------

/// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
void init_uniform(Vec& values, std::size_t fan_in, std::mt19937_64& rng);

/// Scales the listed gradient buffers so their joint L2 norm is at most
/// max_norm; returns the pre-clip norm.
double clip_global_norm(const std::vector<Vec*>& grads, double max_norm);

// ---- checkpoint container --------------------------------------------------
// Binary layout: magic "QLCK1\n", u64 count, then per array
// u32 name length, name bytes, u64 rows, u64 cols, rows*cols f64 values.
// Little-endian throughout.

struct NamedArray {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec values;
};

void save_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> load_checkpoint(const std::string& path);

} // namespace qlogad::nn
