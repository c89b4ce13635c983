#include "qlogad/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace qlogad::models {

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::DeepLog: return "deeplog";
    case ModelKind::LogAnomaly: return "loganomaly";
    case ModelKind::LogRobust: return "logrobust";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "deeplog") return ModelKind::DeepLog;
    if (name == "loganomaly") return ModelKind::LogAnomaly;
    if (name == "logrobust") return ModelKind::LogRobust;
    throw std::invalid_argument("unknown model kind: " + name);
}

nn::Vec one_hot(int vocab_index, std::size_t dim) {
    if (vocab_index < 0 || static_cast<std::size_t>(vocab_index) >= dim) {
        throw std::invalid_argument("one_hot: index out of range");
    }
    nn::Vec v(dim, 0.0);
    v[static_cast<std::size_t>(vocab_index)] = 1.0;
    return v;
}

NextEventNet::NextEventNet(const std::string& name, std::size_t vocab_dim, std::size_t hidden,
                           InputMode mode, bool quantum, const pqc::CircuitDesign& design,
                           std::uint64_t seed)
    : name_(name), vocab_dim_(vocab_dim), hidden_(hidden), mode_(mode) {
    if (vocab_dim_ == 0 || hidden_ == 0) {
        throw std::invalid_argument("NextEventNet: vocab_dim and hidden must be positive");
    }
    std::mt19937_64 rng(seed);
    cell_ = quantum ? CellMaps::quantum(params_, name + ".cell", vocab_dim_, hidden_, design, rng)
                    : CellMaps::affine(params_, name + ".cell", vocab_dim_, hidden_, rng);
    head_w_ = params_.add_init(name + ".head.w", hidden_, vocab_dim_, hidden_, rng);
    head_b_ = params_.add_init(name + ".head.b", 1, vocab_dim_, hidden_, rng);
}

nn::Vec NextEventNet::step_input(const std::vector<int>& history, std::size_t t) const {
    if (mode_ == InputMode::OneHot) {
        const int id = history[t];
        const auto idx = (id >= 0 && static_cast<std::size_t>(id) < vocab_dim_)
                             ? static_cast<std::size_t>(id)
                             : vocab_dim_ - 1; // reserved OOV slot
        nn::Vec v(vocab_dim_, 0.0);
        v[idx] = 1.0;
        return v;
    }
    // Cumulative event counts over the history seen so far (steps 0..t).
    nn::Vec v(vocab_dim_, 0.0);
    for (std::size_t s = 0; s <= t; ++s) {
        const int id = history[s];
        const auto idx = (id >= 0 && static_cast<std::size_t>(id) < vocab_dim_)
                             ? static_cast<std::size_t>(id)
                             : vocab_dim_ - 1;
        v[idx] += 1.0;
    }
    return v;
}

nn::Vec NextEventNet::forward(const std::vector<int>& history) const {
    if (history.empty()) {
        throw std::invalid_argument("NextEventNet::forward: empty history");
    }
    nn::Vec h(hidden_, 0.0), c(hidden_, 0.0);
    for (std::size_t t = 0; t < history.size(); ++t) {
        auto state = cell_forward(params_, cell_, step_input(history, t), h, c);
        h = std::move(state.h);
        c = std::move(state.c);
    }
    return nn::linear_forward(h, params_.tensor(head_w_), params_.vec(head_b_));
}

double NextEventNet::loss(const std::vector<int>& history, int target) const {
    const auto idx = (target >= 0 && static_cast<std::size_t>(target) < vocab_dim_)
                         ? static_cast<std::size_t>(target)
                         : vocab_dim_ - 1;
    return nn::softmax_cross_entropy(forward(history), idx).first;
}

double NextEventNet::loss_grad(const std::vector<int>& history, int target,
                               GradBuffer& grads) const {
    const std::size_t steps = history.size();
    if (steps == 0) {
        throw std::invalid_argument("NextEventNet::loss_grad: empty history");
    }
    std::vector<CellCache> caches(steps);
    nn::Vec h(hidden_, 0.0), c(hidden_, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        auto state = cell_forward(params_, cell_, step_input(history, t), h, c, &caches[t]);
        h = std::move(state.h);
        c = std::move(state.c);
    }
    const nn::Vec logits = nn::linear_forward(h, params_.tensor(head_w_), params_.vec(head_b_));
    const auto idx = (target >= 0 && static_cast<std::size_t>(target) < vocab_dim_)
                         ? static_cast<std::size_t>(target)
                         : vocab_dim_ - 1;
    auto [loss, d_logits] = nn::softmax_cross_entropy(logits, idx);

    const auto head_grads = nn::linear_backward(h, params_.tensor(head_w_), d_logits);
    for (std::size_t i = 0; i < head_grads.w.data.size(); ++i) {
        grads.grad(head_w_)[i] += head_grads.w.data[i];
    }
    for (std::size_t i = 0; i < head_grads.b.size(); ++i) {
        grads.grad(head_b_)[i] += head_grads.b[i];
    }

    nn::Vec dh = head_grads.x;
    nn::Vec dc(hidden_, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        auto input_grads = cell_backward(params_, cell_, grads, caches[t], dh, dc);
        dh = std::move(input_grads.h_prev);
        dc = std::move(input_grads.c_prev);
        // Step inputs are data, not parameters; their gradients stop here.
    }
    return loss;
}

const nn::Vec* LogitsCache::find(const std::vector<int>& history) const {
    const auto it = memo_.find(key_of(history));
    return it == memo_.end() ? nullptr : &it->second;
}

void LogitsCache::insert(const std::vector<int>& history, nn::Vec logits) {
    memo_.emplace(key_of(history), std::move(logits));
}

std::string LogitsCache::key_of(const std::vector<int>& history) {
    std::string key(history.size() * sizeof(int), '\0');
    std::memcpy(key.data(), history.data(), key.size());
    return key;
}

bool target_in_top_g(const nn::Vec& logits, int target, int g) {
    if (g <= 0) {
        return false;
    }
    if (static_cast<std::size_t>(g) >= logits.size()) {
        return true;
    }
    const auto idx = (target >= 0 && static_cast<std::size_t>(target) < logits.size())
                         ? static_cast<std::size_t>(target)
                         : logits.size() - 1;
    const double own = logits[idx];
    int better = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (i == idx) {
            continue;
        }
        if (logits[i] > own || (logits[i] == own && i < idx)) {
            ++better;
        }
    }
    return better < g;
}

namespace {

const nn::Vec& cached_logits(const NextEventNet& net, const std::vector<int>& history,
                             LogitsCache* cache, nn::Vec& scratch) {
    if (cache) {
        if (const nn::Vec* hit = cache->find(history)) {
            return *hit;
        }
        cache->insert(history, net.forward(history));
        return *cache->find(history);
    }
    scratch = net.forward(history);
    return scratch;
}

// True when every sliding top-g check passes.
bool window_passes(const NextEventNet& net, const std::vector<int>& window, std::size_t history,
                   int g, LogitsCache* cache) {
    nn::Vec scratch;
    for (std::size_t t = history; t < window.size(); ++t) {
        const std::vector<int> h(window.begin() + static_cast<std::ptrdiff_t>(t - history),
                                 window.begin() + static_cast<std::ptrdiff_t>(t));
        const nn::Vec& logits = cached_logits(net, h, cache, scratch);
        if (!target_in_top_g(logits, window[t], g)) {
            return false;
        }
    }
    return true;
}

} // namespace

std::optional<bool> deeplog_detect(const NextEventNet& net, const std::vector<int>& window,
                                   std::size_t history, int g, LogitsCache* cache) {
    if (window.size() < history + 1) {
        std::cerr << "warning: window of " << window.size()
                  << " events is shorter than history+1, skipped\n";
        return std::nullopt;
    }
    return !window_passes(net, window, history, g, cache);
}

std::optional<bool> loganomaly_detect(const NextEventNet& sequential,
                                      const NextEventNet& quantitative,
                                      const std::vector<int>& window, std::size_t history, int g,
                                      LogitsCache* seq_cache, LogitsCache* quant_cache) {
    if (window.size() < history + 1) {
        std::cerr << "warning: window of " << window.size()
                  << " events is shorter than history+1, skipped\n";
        return std::nullopt;
    }
    // Normal only when both checks pass.
    const bool seq_ok = window_passes(sequential, window, history, g, seq_cache);
    const bool quant_ok = seq_ok && window_passes(quantitative, window, history, g, quant_cache);
    return !(seq_ok && quant_ok);
}

LogRobustClassifier::LogRobustClassifier(const ModelConfig& config)
    : vocab_dim_(config.vocab_dim),
      embedding_dim_(config.embedding_dim),
      hidden_(config.resolved_hidden()) {
    if (vocab_dim_ == 0 || embedding_dim_ == 0 || hidden_ == 0) {
        throw std::invalid_argument("LogRobustClassifier: zero dimension");
    }
    std::mt19937_64 rng(config.seed);
    embed_ = params_.add_init("robust.embed", vocab_dim_, embedding_dim_, embedding_dim_, rng);
    const std::size_t d = 2 * hidden_;
    if (config.quantum) {
        forward_cell_ = CellMaps::quantum(params_, "robust.fwd", embedding_dim_, hidden_,
                                          config.cell_design, rng);
        backward_cell_ = CellMaps::quantum(params_, "robust.bwd", embedding_dim_, hidden_,
                                           config.cell_design, rng);
        attention_ = QAttention::quantum(params_, "robust.attn", d, config.attention_design, rng,
                                         config.share_attention_register);
    } else {
        forward_cell_ = CellMaps::affine(params_, "robust.fwd", embedding_dim_, hidden_, rng);
        backward_cell_ = CellMaps::affine(params_, "robust.bwd", embedding_dim_, hidden_, rng);
        attention_ = QAttention::affine(params_, "robust.attn", d, rng);
    }
    head_w_ = params_.add_init("robust.head.w", d, 1, d, rng);
    head_b_ = params_.add_init("robust.head.b", 1, 1, d, rng);
}

int LogRobustClassifier::qubit_count() const {
    return forward_cell_.qubit_count() + backward_cell_.qubit_count() + attention_.qubit_count();
}

double LogRobustClassifier::run(const std::vector<int>& window, int label, GradBuffer* grads,
                                double* out_prob) const {
    const std::size_t k = window.size();
    if (k == 0) {
        throw std::invalid_argument("LogRobustClassifier: empty window");
    }
    const nn::Tensor2 embed = params_.tensor(embed_);
    const auto embed_row = [&](int id) {
        const auto idx = (id >= 0 && static_cast<std::size_t>(id) < vocab_dim_)
                             ? static_cast<std::size_t>(id)
                             : vocab_dim_ - 1;
        nn::Vec row(embedding_dim_);
        for (std::size_t c = 0; c < embedding_dim_; ++c) {
            row[c] = embed.at(idx, c);
        }
        return row;
    };

    // Two direction-opposed passes over the embedded events.
    std::vector<CellCache> fwd_caches(grads ? k : 0), bwd_caches(grads ? k : 0);
    std::vector<nn::Vec> fwd_h(k), bwd_h(k);
    nn::Vec h(hidden_, 0.0), c(hidden_, 0.0);
    for (std::size_t t = 0; t < k; ++t) {
        auto state = cell_forward(params_, forward_cell_, embed_row(window[t]), h, c,
                                  grads ? &fwd_caches[t] : nullptr);
        h = std::move(state.h);
        c = std::move(state.c);
        fwd_h[t] = h;
    }
    h.assign(hidden_, 0.0);
    c.assign(hidden_, 0.0);
    for (std::size_t t = k; t-- > 0;) {
        auto state = cell_forward(params_, backward_cell_, embed_row(window[t]), h, c,
                                  grads ? &bwd_caches[t] : nullptr);
        h = std::move(state.h);
        c = std::move(state.c);
        bwd_h[t] = h;
    }

    const std::size_t d = 2 * hidden_;
    nn::Tensor2 x(k, d);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < hidden_; ++j) {
            x.at(t, j) = fwd_h[t][j];
            x.at(t, hidden_ + j) = bwd_h[t][j];
        }
    }

    QAttention::Cache attn_cache;
    const nn::Tensor2 attended = attention_.forward(params_, x, grads ? &attn_cache : nullptr);

    nn::Vec pooled(d, 0.0);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < d; ++j) {
            pooled[j] += attended.at(t, j) / static_cast<double>(k);
        }
    }
    const nn::Vec logit = nn::linear_forward(pooled, params_.tensor(head_w_), params_.vec(head_b_));
    const double p = 1.0 / (1.0 + std::exp(-logit[0]));
    if (out_prob) {
        *out_prob = p;
    }
    const auto [loss, d_p] = nn::binary_cross_entropy(p, label);
    if (!grads) {
        return loss;
    }

    // Backward.
    const double d_logit = d_p * p * (1.0 - p);
    const auto head_grads = nn::linear_backward(pooled, params_.tensor(head_w_), {d_logit});
    for (std::size_t i = 0; i < head_grads.w.data.size(); ++i) {
        grads->grad(head_w_)[i] += head_grads.w.data[i];
    }
    grads->grad(head_b_)[0] += head_grads.b[0];

    nn::Tensor2 d_attended(k, d);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < d; ++j) {
            d_attended.at(t, j) = head_grads.x[j] / static_cast<double>(k);
        }
    }
    const nn::Tensor2 dx = attention_.backward(params_, *grads, attn_cache, x, d_attended);

    // BPTT through both directions; embedding rows collect the input grads.
    nn::Vec dh(hidden_, 0.0), dc(hidden_, 0.0);
    std::vector<nn::Vec> d_embed(k, nn::Vec(embedding_dim_, 0.0));
    for (std::size_t t = k; t-- > 0;) {
        for (std::size_t j = 0; j < hidden_; ++j) {
            dh[j] += dx.at(t, j);
        }
        auto input_grads = cell_backward(params_, forward_cell_, *grads, fwd_caches[t], dh, dc);
        dh = std::move(input_grads.h_prev);
        dc = std::move(input_grads.c_prev);
        for (std::size_t j = 0; j < embedding_dim_; ++j) {
            d_embed[t][j] += input_grads.x[j];
        }
    }
    dh.assign(hidden_, 0.0);
    dc.assign(hidden_, 0.0);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < hidden_; ++j) {
            dh[j] += dx.at(t, hidden_ + j);
        }
        auto input_grads = cell_backward(params_, backward_cell_, *grads, bwd_caches[t], dh, dc);
        dh = std::move(input_grads.h_prev);
        dc = std::move(input_grads.c_prev);
        for (std::size_t j = 0; j < embedding_dim_; ++j) {
            d_embed[t][j] += input_grads.x[j];
        }
    }
    for (std::size_t t = 0; t < k; ++t) {
        const int id = window[t];
        const auto idx = (id >= 0 && static_cast<std::size_t>(id) < vocab_dim_)
                             ? static_cast<std::size_t>(id)
                             : vocab_dim_ - 1;
        for (std::size_t j = 0; j < embedding_dim_; ++j) {
            grads->grad(embed_)[idx * embedding_dim_ + j] += d_embed[t][j];
        }
    }
    return loss;
}

double LogRobustClassifier::prob(const std::vector<int>& window) const {
    double p = 0.0;
    (void)run(window, 0, nullptr, &p);
    return p;
}

double LogRobustClassifier::loss(const std::vector<int>& window, int label) const {
    return run(window, label, nullptr, nullptr);
}

double LogRobustClassifier::loss_grad(const std::vector<int>& window, int label,
                                      GradBuffer& grads) const {
    return run(window, label, &grads, nullptr);
}

LogAdModel LogAdModel::create(const ModelConfig& config) {
    LogAdModel model;
    model.config_ = config;
    const std::size_t hidden = config.resolved_hidden();
    switch (config.kind) {
    case ModelKind::DeepLog:
        model.nets_.push_back(std::make_unique<NextEventNet>(
            "seq", config.vocab_dim, hidden, InputMode::OneHot, config.quantum,
            config.cell_design, config.seed));
        break;
    case ModelKind::LogAnomaly:
        model.nets_.push_back(std::make_unique<NextEventNet>(
            "seq", config.vocab_dim, hidden, InputMode::OneHot, config.quantum,
            config.cell_design, config.seed));
        model.nets_.push_back(std::make_unique<NextEventNet>(
            "quant", config.vocab_dim, hidden, InputMode::Counts, config.quantum,
            config.cell_design, config.seed + 1));
        break;
    case ModelKind::LogRobust:
        model.robust_.emplace(config);
        break;
    }
    return model;
}

std::optional<bool> LogAdModel::detect(const std::vector<int>& window,
                                       std::vector<LogitsCache>* caches) const {
    switch (config_.kind) {
    case ModelKind::DeepLog:
        return deeplog_detect(*nets_[0], window, config_.history, config_.top_g,
                              caches && !caches->empty() ? &(*caches)[0] : nullptr);
    case ModelKind::LogAnomaly:
        return loganomaly_detect(*nets_[0], *nets_[1], window, config_.history, config_.top_g,
                                 caches && caches->size() > 0 ? &(*caches)[0] : nullptr,
                                 caches && caches->size() > 1 ? &(*caches)[1] : nullptr);
    case ModelKind::LogRobust:
        return robust_->prob(window) >= 0.5;
    }
    return std::nullopt;
}

ParamReport LogAdModel::count_parameters() const {
    ParamReport report;
    for (const auto& net : nets_) {
        report.classical_bits += static_cast<std::uint64_t>(net->params().total_values()) * 32;
        report.qubit_count += net->qubit_count();
    }
    if (robust_) {
        report.classical_bits += static_cast<std::uint64_t>(robust_->params().total_values()) * 32;
        report.qubit_count += robust_->qubit_count();
    }
    return report;
}

std::vector<nn::NamedArray> LogAdModel::to_named_arrays() const {
    std::vector<nn::NamedArray> out;
    for (const auto& net : nets_) {
        auto arrays = net->params().to_named_arrays(net->name() + "/");
        out.insert(out.end(), arrays.begin(), arrays.end());
    }
    if (robust_) {
        auto arrays = robust_->params().to_named_arrays("robust/");
        out.insert(out.end(), arrays.begin(), arrays.end());
    }
    return out;
}

void LogAdModel::load_named_arrays(const std::vector<nn::NamedArray>& arrays) {
    for (auto& net : nets_) {
        net->params().load_named_arrays(arrays, net->name() + "/");
    }
    if (robust_) {
        robust_->params().load_named_arrays(arrays, "robust/");
    }
}

std::string format_param_report(const ParamReport& report) {
    const auto grouped = [](std::uint64_t value) {
        std::string digits = std::to_string(value);
        std::string out;
        int count = 0;
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            if (count != 0 && count % 3 == 0) {
                out.push_back(',');
            }
            out.push_back(*it);
            ++count;
        }
        std::reverse(out.begin(), out.end());
        return out;
    };
    std::string text = grouped(report.classical_bits) + " bit";
    if (report.qubit_count > 0) {
        text += " + " + std::to_string(report.qubit_count) + " qubit";
    }
    return text;
}

} // namespace qlogad::models
