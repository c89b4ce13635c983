#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlogad/logpipe.hpp"
#include "qlogad/models.hpp"

namespace qlogad::harness {

// ---- metrics ---------------------------------------------------------------

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
};

/// Precision = TP/(TP+FP), Recall = TP/(TP+FN), Specificity = TN/(TN+FP),
/// F1 = 2PR/(P+R). Zero denominators yield 0.
Metrics compute_metrics(const ConfusionCounts& counts);

// ---- experiment configuration -----------------------------------------------

/// Plain-text key=value experiment description. Anything beyond the core
/// sweep fields (hidden, history, top_g, caps, ...) is a desk-scale
/// extension with a recorded default.
struct ExperimentConfig {
    std::string name = "experiment";
    std::string model = "deeplog"; // deeplog | loganomaly | logrobust
    std::string variant = "quantum"; // classical | quantum
    std::string dataset;             // file path, parsed CSV, or synth: URI
    std::size_t window_size = 100;
    int n_qubits = 4;
    std::string encoding = "angle_rx";
    std::string layout = "rx";
    int n_layers = 1;
    double lr = 1e-4;
    std::size_t epochs = 50;
    double train_ratio = 1.0;
    std::uint64_t seed = 7;

    // Extensions (desk-scale knobs; defaults recorded here).
    std::size_t hidden = 0; // 0 -> model default
    std::size_t history = 10;
    int top_g = 9;
    std::size_t embedding_dim = 16;
    double train_fraction = 0.8;
    double val_fraction = 0.1;          // tail of the training split
    std::size_t batch_size = 4;
    std::size_t max_pairs_per_epoch = 2000;   // next-event training cap
    std::size_t max_windows_per_epoch = 16;   // logrobust training cap
    double oversample_ratio = 1.0 / 3.0;      // anomalies : normals
    bool ring_entanglement = false;
    bool h_prep = false; // Hadamard layer before the encoding rotations
    bool share_attention_register = true;
    std::string outdir = "runs";

    bool quantum() const { return variant == "quantum"; }

    std::string to_text() const;
    static ExperimentConfig from_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);

    models::ModelConfig model_config(std::size_t vocab_dim) const;
    void validate() const;
};

// ---- results ----------------------------------------------------------------

struct EpochLoss {
    double train = 0.0;
    double val = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    ConfusionCounts counts;
    Metrics metrics;
    std::vector<EpochLoss> losses;
    std::uint64_t classical_bits = 0;
    int qubit_count = 0;
    double wall_seconds = 0.0;
    std::size_t evaluated_windows = 0;
    std::size_t skipped_windows = 0;
};

// ---- synthetic corpus ---------------------------------------------------------

/// Deterministic log grammar: `cycle_events` templates fire in a fixed
/// cycle; anomalous windows replace a run of lines with alert-labeled fault
/// lines, placed so at least one lands in the predicted region.
struct SynthSpec {
    std::size_t n_windows = 5000;
    std::size_t window_size = 100;
    int cycle_events = 24;
    double anomaly_rate = 0.08;
    std::size_t burst_min = 4;
    std::size_t burst_max = 8;
    std::uint64_t seed = 7;
};

std::vector<std::string> generate_synthetic_log(const SynthSpec& spec);
void write_synthetic_log(const std::string& path, const SynthSpec& spec);

/// "synth:windows=5000,seed=7,window=100,events=24,rate=0.08"
bool is_synth_uri(const std::string& dataset);
SynthSpec parse_synth_uri(const std::string& dataset);

// ---- orchestration -------------------------------------------------------------

/// Worker threads for batch gradient evaluation, from QLOGAD_THREADS
/// (default 1). Gradient reduction order is fixed, so results do not
/// depend on this value beyond floating-point grouping.
std::size_t thread_count();

struct PreparedData {
    std::vector<logpipe::WindowedSample> train; // after filtering/subsampling
    std::vector<logpipe::WindowedSample> val;
    std::vector<logpipe::WindowedSample> test;
    logpipe::Vocabulary vocab;
    // Drain patterns when the dataset was raw text; empty for parsed CSV.
    std::vector<std::vector<std::string>> templates;
};

/// Dataset loading, parsing, windowing, splitting, filtering, subsampling,
/// and the chronological validation tail.
PreparedData prepare_data(const ExperimentConfig& config);

/// Full pipeline -> train -> evaluate with per-epoch loss capture.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Training only; exposed for the CLI train/eval split.
struct TrainedModel {
    models::LogAdModel model;
    std::vector<EpochLoss> losses;
};
TrainedModel train_model(const ExperimentConfig& config, const PreparedData& data);

ConfusionCounts evaluate_model(const models::LogAdModel& model,
                               const std::vector<logpipe::WindowedSample>& test,
                               const logpipe::Vocabulary& vocab, std::size_t* evaluated = nullptr,
                               std::size_t* skipped = nullptr);

// ---- reports --------------------------------------------------------------------

std::string results_csv_header();
std::string results_csv_row(const ExperimentResult& result);

/// Writes results.csv, one loss_<name>.csv per result, and table.txt.
void emit_reports(const std::vector<ExperimentResult>& results, const std::string& outdir);

/// Built-in sweep presets rq1..rq6. `dataset` overrides the default
/// synthetic corpus when non-empty.
std::vector<ExperimentConfig> preset(const std::string& name, const std::string& dataset = "");

// ---- checkpoints ------------------------------------------------------------------

/// Writes <prefix>.ckpt (arrays), <prefix>.meta (config + vocab sidecar)
/// and, when templates are present, <prefix>.templates.tsv.
void save_model(const std::string& prefix, const models::LogAdModel& model,
                const ExperimentConfig& config, const logpipe::Vocabulary& vocab,
                const std::vector<std::vector<std::string>>& templates = {});

struct LoadedModel {
    models::LogAdModel model;
    ExperimentConfig config;
    logpipe::Vocabulary vocab;
    std::vector<std::vector<std::string>> templates;
};
LoadedModel load_model(const std::string& prefix);

/// Windows for evaluation data: raw text and synth URIs go through the
/// frozen template set; parsed CSVs use their ids directly.
std::vector<logpipe::WindowedSample> load_eval_windows(
    const std::string& dataset, std::size_t window_size,
    const std::vector<std::vector<std::string>>& templates);

} // namespace qlogad::harness
