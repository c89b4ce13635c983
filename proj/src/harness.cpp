#include "qlogad/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qlogad::harness {

std::size_t thread_count() {
    const char* env = std::getenv("QLOGAD_THREADS");
    if (!env || !*env) {
        return 1;
    }
    const long value = std::strtol(env, nullptr, 10);
    if (value < 1) {
        return 1;
    }
    return static_cast<std::size_t>(std::min<long>(value, 64));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.config = config;

    const PreparedData data = prepare_data(config);
    TrainedModel trained = train_model(config, data);
    result.losses = std::move(trained.losses);
    result.counts = evaluate_model(trained.model, data.test, data.vocab,
                                   &result.evaluated_windows, &result.skipped_windows);
    result.metrics = compute_metrics(result.counts);
    const auto report = trained.model.count_parameters();
    result.classical_bits = report.classical_bits;
    result.qubit_count = report.qubit_count;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

namespace {

std::string fmt(double value, int precision = 6) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << value;
    return out.str();
}

std::string fmt_short(double value) {
    std::ostringstream out;
    out << value;
    return out.str();
}

// RFC-4180 quoting for fields that may carry commas (dataset URIs do).
std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) {
        return value;
    }
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

} // namespace

std::string results_csv_header() {
    return "name,model,variant,dataset,window_size,n_qubits,encoding,layout,n_layers,lr,"
           "epochs,train_ratio,seed,precision,recall,specificity,f1,classical_bits,qubit_count";
}

std::string results_csv_row(const ExperimentResult& result) {
    const ExperimentConfig& c = result.config;
    std::ostringstream out;
    out << csv_field(c.name) << ',' << c.model << ',' << c.variant << ','
        << csv_field(c.dataset) << ',' << c.window_size << ',' << c.n_qubits << ','
        << c.encoding << ',' << c.layout << ',' << c.n_layers << ',' << fmt_short(c.lr) << ','
        << c.epochs << ',' << fmt_short(c.train_ratio) << ',' << c.seed << ','
        << fmt(result.metrics.precision) << ',' << fmt(result.metrics.recall) << ','
        << fmt(result.metrics.specificity) << ',' << fmt(result.metrics.f1) << ','
        << result.classical_bits << ',' << result.qubit_count;
    return out.str();
}

void emit_reports(const std::vector<ExperimentResult>& results, const std::string& outdir) {
    if (results.empty()) {
        throw std::invalid_argument("emit_reports: no results");
    }
    std::filesystem::create_directories(outdir);

    {
        std::ofstream csv(outdir + "/results.csv");
        if (!csv) {
            throw std::runtime_error("cannot write " + outdir + "/results.csv");
        }
        csv << results_csv_header() << '\n';
        for (const auto& result : results) {
            csv << results_csv_row(result) << '\n';
        }
    }

    for (const auto& result : results) {
        std::ofstream loss(outdir + "/loss_" + result.config.name + ".csv");
        if (!loss) {
            throw std::runtime_error("cannot write loss file for " + result.config.name);
        }
        loss << "epoch,train_loss,val_loss\n";
        for (std::size_t epoch = 0; epoch < result.losses.size(); ++epoch) {
            loss << (epoch + 1) << ',' << fmt(result.losses[epoch].train, 8) << ','
                 << fmt(result.losses[epoch].val, 8) << '\n';
        }
    }

    // Text table: one block per model, quantum and classical side by side.
    std::ofstream table(outdir + "/table.txt");
    if (!table) {
        throw std::runtime_error("cannot write " + outdir + "/table.txt");
    }
    std::map<std::string, std::map<std::string, const ExperimentResult*>> by_model;
    for (const auto& result : results) {
        by_model[result.config.model][result.config.name] = &result;
    }
    table << std::left << std::setw(14) << "Model" << std::setw(10) << "Metrics" << "\n";
    const char* metric_names[] = {"Prec", "Rec", "Spec", "F1"};
    for (const auto& [model, runs] : by_model) {
        bool head = true;
        for (int m = 0; m < 4; ++m) {
            table << std::left << std::setw(14) << (head ? model : "") << std::setw(10)
                  << metric_names[m];
            head = false;
            for (const auto& [name, result] : runs) {
                const Metrics& mt = result->metrics;
                const double value = m == 0   ? mt.precision
                                     : m == 1 ? mt.recall
                                     : m == 2 ? mt.specificity
                                              : mt.f1;
                table << std::setw(26) << (name + "=" + fmt(value, 3));
            }
            table << "\n";
        }
        for (const auto& [name, result] : runs) {
            table << "  " << name << ": "
                  << models::format_param_report(
                         {result->classical_bits, result->qubit_count})
                  << "\n";
        }
    }
}

namespace {

ExperimentConfig preset_base(const std::string& dataset) {
    ExperimentConfig config;
    config.dataset = dataset.empty() ? "synth:windows=600,seed=11" : dataset;
    config.window_size = 100;
    config.lr = 1e-4;
    config.seed = 7;
    config.epochs = 6;
    config.max_pairs_per_epoch = 400;
    config.max_windows_per_epoch = 8;
    config.batch_size = 4;
    return config;
}

} // namespace

std::vector<ExperimentConfig> preset(const std::string& name, const std::string& dataset) {
    std::vector<ExperimentConfig> grid;
    if (name == "rq1") {
        // Classical baselines against their quantum counterparts.
        for (const char* model : {"deeplog", "loganomaly", "logrobust"}) {
            for (const char* variant : {"quantum", "classical"}) {
                ExperimentConfig config = preset_base(dataset);
                config.model = model;
                config.variant = variant;
                config.epochs = 30;
                config.max_pairs_per_epoch = 1200;
                config.name = std::string(variant == std::string("quantum") ? "q" : "") + model;
                grid.push_back(config);
            }
        }
        return grid;
    }
    if (name == "rq2") {
        // Encoding sweep.
        for (const char* model : {"deeplog", "loganomaly"}) {
            for (const char* encoding : {"angle_rx", "angle_ry", "angle_rz", "amplitude"}) {
                ExperimentConfig config = preset_base(dataset);
                config.model = model;
                config.encoding = encoding;
                config.name = std::string("q") + model + "_" + encoding;
                grid.push_back(config);
            }
        }
        return grid;
    }
    if (name == "rq3") {
        // Qubit-count sweep.
        for (const char* model : {"deeplog", "loganomaly"}) {
            for (int qubits : {4, 6, 8}) {
                ExperimentConfig config = preset_base(dataset);
                config.model = model;
                config.n_qubits = qubits;
                config.name = std::string("q") + model + "_" + std::to_string(qubits) + "q";
                grid.push_back(config);
            }
        }
        return grid;
    }
    if (name == "rq4") {
        // Circuit-design sweep.
        for (const char* model : {"deeplog", "loganomaly"}) {
            for (const char* layout : {"rx", "rxry", "ryrx", "rz"}) {
                ExperimentConfig config = preset_base(dataset);
                config.model = model;
                config.layout = layout;
                config.name = std::string("q") + model + "_" + layout;
                grid.push_back(config);
            }
        }
        return grid;
    }
    if (name == "rq5") {
        // Training-ratio sweep over both variants.
        for (const char* model : {"deeplog", "loganomaly"}) {
            for (const char* variant : {"quantum", "classical"}) {
                for (double ratio : {0.01, 0.1, 0.5, 1.0}) {
                    ExperimentConfig config = preset_base(dataset);
                    config.model = model;
                    config.variant = variant;
                    config.train_ratio = ratio;
                    std::ostringstream name_out;
                    name_out << (variant == std::string("quantum") ? "q" : "") << model << "_r"
                             << ratio;
                    config.name = name_out.str();
                    grid.push_back(config);
                }
            }
        }
        return grid;
    }
    if (name == "rq6") {
        // Loss curves over 100 epochs for every variant.
        for (const char* model : {"deeplog", "loganomaly", "logrobust"}) {
            for (const char* variant : {"quantum", "classical"}) {
                ExperimentConfig config = preset_base(dataset.empty()
                                                          ? "synth:windows=300,seed=11"
                                                          : dataset);
                config.model = model;
                config.variant = variant;
                config.epochs = 100;
                config.max_pairs_per_epoch = 240;
                config.max_windows_per_epoch = 4;
                config.name =
                    std::string(variant == std::string("quantum") ? "q" : "") + model + "_loss";
                grid.push_back(config);
            }
        }
        return grid;
    }
    throw std::invalid_argument("unknown preset: " + name +
                                " (expected rq1, rq2, rq3, rq4, rq5 or rq6)");
}

void save_model(const std::string& prefix, const models::LogAdModel& model,
                const ExperimentConfig& config, const logpipe::Vocabulary& vocab,
                const std::vector<std::vector<std::string>>& templates) {
    nn::save_checkpoint(prefix + ".ckpt", model.to_named_arrays());
    std::ofstream meta(prefix + ".meta");
    if (!meta) {
        throw std::runtime_error("cannot write " + prefix + ".meta");
    }
    meta << config.to_text();
    meta << "vocab = " << vocab.serialize() << "\n";
    if (!templates.empty()) {
        logpipe::write_templates(prefix + ".templates.tsv", templates);
    }
}

LoadedModel load_model(const std::string& prefix) {
    std::ifstream meta(prefix + ".meta");
    if (!meta) {
        throw std::runtime_error("cannot open " + prefix + ".meta");
    }
    std::string config_text, vocab_text, line;
    while (std::getline(meta, line)) {
        if (line.rfind("vocab =", 0) == 0 || line.rfind("vocab=", 0) == 0) {
            vocab_text = line.substr(line.find('=') + 1);
            if (!vocab_text.empty() && vocab_text.front() == ' ') {
                vocab_text.erase(0, 1);
            }
        } else {
            config_text += line + "\n";
        }
    }
    LoadedModel loaded{models::LogAdModel(), ExperimentConfig::from_text(config_text),
                       logpipe::Vocabulary::deserialize(vocab_text),
                       {}};
    loaded.model = models::LogAdModel::create(loaded.config.model_config(loaded.vocab.dim()));
    loaded.model.load_named_arrays(nn::load_checkpoint(prefix + ".ckpt"));
    if (std::filesystem::exists(prefix + ".templates.tsv")) {
        loaded.templates = logpipe::load_templates(prefix + ".templates.tsv");
    }
    return loaded;
}

std::vector<logpipe::WindowedSample> load_eval_windows(
    const std::string& dataset, std::size_t window_size,
    const std::vector<std::vector<std::string>>& templates) {
    logpipe::EventStream stream;
    const bool csv = dataset.size() > 4 &&
                     dataset.compare(dataset.size() - 4, 4, ".csv") == 0;
    if (csv) {
        stream = logpipe::load_parsed_csv(dataset);
    } else {
        if (templates.empty()) {
            throw std::runtime_error(
                "evaluating raw text needs the checkpoint's frozen templates");
        }
        std::vector<std::string> lines;
        if (is_synth_uri(dataset)) {
            lines = generate_synthetic_log(parse_synth_uri(dataset));
        } else {
            std::ifstream in(dataset);
            if (!in) {
                throw std::runtime_error("cannot open dataset " + dataset);
            }
            std::string line;
            while (std::getline(in, line)) {
                lines.push_back(line);
            }
        }
        std::size_t line_no = 0;
        for (const std::string& line : lines) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            const auto record = logpipe::parse_raw_line(line, line_no);
            stream.event_ids.push_back(logpipe::match_frozen(templates, record.content));
            stream.alerts.push_back(record.alert ? 1 : 0);
        }
    }
    return logpipe::windowize(stream, window_size);
}

} // namespace qlogad::harness
