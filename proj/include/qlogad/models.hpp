#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qlogad/qlayer.hpp"

namespace qlogad::models {

enum class ModelKind { DeepLog, LogAnomaly, LogRobust };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelConfig {
    ModelKind kind = ModelKind::DeepLog;
    bool quantum = false;
    std::size_t vocab_dim = 0; // |V| + 1, OOV slot last
    std::size_t hidden = 0;    // 0 picks the default: n_qubits (quantum) or 32
    std::size_t history = 10;  // prediction history length h
    int top_g = 9;
    std::size_t embedding_dim = 16; // LogRobust event embeddings
    pqc::CircuitDesign cell_design{pqc::Layout::Rx, 4, 1, encode::Scheme::AngleRx};
    pqc::CircuitDesign attention_design{pqc::Layout::Rx, 8, 1, encode::Scheme::AngleRx};
    bool share_attention_register = true;
    std::uint64_t seed = 7;

    std::size_t resolved_hidden() const {
        if (hidden != 0) {
            return hidden;
        }
        return quantum ? static_cast<std::size_t>(cell_design.n_qubits) : 32;
    }
};

/// How a next-event net sees its history window.
enum class InputMode { OneHot, Counts };

nn::Vec one_hot(int vocab_index, std::size_t dim);

/// Recurrent next-event predictor: (Q)LSTM unrolled over the history, then
/// a linear head to vocab_dim logits.
class NextEventNet {
public:
    NextEventNet(const std::string& name, std::size_t vocab_dim, std::size_t hidden,
                 InputMode mode, bool quantum, const pqc::CircuitDesign& design,
                 std::uint64_t seed);

    nn::Vec forward(const std::vector<int>& history) const;
    double loss(const std::vector<int>& history, int target) const;
    double loss_grad(const std::vector<int>& history, int target, GradBuffer& grads) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const std::string& name() const { return name_; }
    std::size_t vocab_dim() const { return vocab_dim_; }
    std::size_t hidden() const { return hidden_; }
    InputMode mode() const { return mode_; }
    int qubit_count() const { return cell_.qubit_count(); }

    /// Input vector fed at step t of a history.
    nn::Vec step_input(const std::vector<int>& history, std::size_t t) const;

private:
    std::string name_;
    std::size_t vocab_dim_ = 0;
    std::size_t hidden_ = 0;
    InputMode mode_ = InputMode::OneHot;
    ParamSet params_;
    CellMaps cell_;
    std::size_t head_w_ = 0, head_b_ = 0;
};

/// Logits memo for detection sweeps; histories repeat heavily in log data.
class LogitsCache {
public:
    const nn::Vec* find(const std::vector<int>& history) const;
    void insert(const std::vector<int>& history, nn::Vec logits);

private:
    static std::string key_of(const std::vector<int>& history);
    std::unordered_map<std::string, nn::Vec> memo_;
};

/// True when `target` is among the g highest logits. Ties are broken by
/// lower index first, matching a stable sort on (-logit, index).
bool target_in_top_g(const nn::Vec& logits, int target, int g);

/// DeepLog rule: the window is anomalous iff some actual next event falls
/// outside the top-g prediction at its position. Returns nullopt when the
/// window is shorter than history+1 (skipped with a warning).
std::optional<bool> deeplog_detect(const NextEventNet& net, const std::vector<int>& window,
                                   std::size_t history, int g, LogitsCache* cache = nullptr);

/// LogAnomaly rule: normal only if the sequential and the quantitative
/// model both pass their top-g checks.
std::optional<bool> loganomaly_detect(const NextEventNet& sequential,
                                      const NextEventNet& quantitative,
                                      const std::vector<int>& window, std::size_t history, int g,
                                      LogitsCache* seq_cache = nullptr,
                                      LogitsCache* quant_cache = nullptr);

/// Supervised window classifier: embeddings -> Bi-LSTM -> attention over
/// time steps -> mean pool -> linear + sigmoid.
class LogRobustClassifier {
public:
    LogRobustClassifier(const ModelConfig& config);

    double prob(const std::vector<int>& window) const;
    double loss(const std::vector<int>& window, int label) const;
    double loss_grad(const std::vector<int>& window, int label, GradBuffer& grads) const;

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    int qubit_count() const;

private:
    double run(const std::vector<int>& window, int label, GradBuffer* grads, double* out_prob) const;

    std::size_t vocab_dim_ = 0, embedding_dim_ = 0, hidden_ = 0;
    ParamSet params_;
    std::size_t embed_ = 0;
    CellMaps forward_cell_, backward_cell_;
    QAttention attention_;
    std::size_t head_w_ = 0, head_b_ = 0;
};

struct ParamReport {
    std::uint64_t classical_bits = 0;
    int qubit_count = 0;
};

/// Uniform handle over the six model variants.
class LogAdModel {
public:
    static LogAdModel create(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    ModelKind kind() const { return config_.kind; }
    bool is_next_event() const { return config_.kind != ModelKind::LogRobust; }

    /// Next-event family: nets()[0] is the sequential model, nets()[1] the
    /// quantitative one (LogAnomaly only).
    std::vector<std::unique_ptr<NextEventNet>>& nets() { return nets_; }
    const std::vector<std::unique_ptr<NextEventNet>>& nets() const { return nets_; }
    LogRobustClassifier* robust() { return robust_ ? &*robust_ : nullptr; }
    const LogRobustClassifier* robust() const { return robust_ ? &*robust_ : nullptr; }

    /// window is a vocab-index event sequence; true = anomaly.
    std::optional<bool> detect(const std::vector<int>& window,
                               std::vector<LogitsCache>* caches = nullptr) const;

    ParamReport count_parameters() const;

    std::vector<nn::NamedArray> to_named_arrays() const;
    void load_named_arrays(const std::vector<nn::NamedArray>& arrays);

private:
    ModelConfig config_;
    std::vector<std::unique_ptr<NextEventNet>> nets_;
    std::optional<LogRobustClassifier> robust_;
};

/// "8,896 bit + 16 qubit" (comma-grouped); classical models drop the qubit term.
std::string format_param_report(const ParamReport& report);

} // namespace qlogad::models
