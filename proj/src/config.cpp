#include "qlogad/harness.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qlogad::harness {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

} // namespace

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "name = " << name << "\n"
        << "model = " << model << "\n"
        << "variant = " << variant << "\n"
        << "dataset = " << dataset << "\n"
        << "window_size = " << window_size << "\n"
        << "n_qubits = " << n_qubits << "\n"
        << "encoding = " << encoding << "\n"
        << "layout = " << layout << "\n"
        << "n_layers = " << n_layers << "\n"
        << "lr = " << lr << "\n"
        << "epochs = " << epochs << "\n"
        << "train_ratio = " << train_ratio << "\n"
        << "seed = " << seed << "\n"
        << "hidden = " << hidden << "\n"
        << "history = " << history << "\n"
        << "top_g = " << top_g << "\n"
        << "embedding_dim = " << embedding_dim << "\n"
        << "train_fraction = " << train_fraction << "\n"
        << "val_fraction = " << val_fraction << "\n"
        << "batch_size = " << batch_size << "\n"
        << "max_pairs_per_epoch = " << max_pairs_per_epoch << "\n"
        << "max_windows_per_epoch = " << max_windows_per_epoch << "\n"
        << "oversample_ratio = " << oversample_ratio << "\n"
        << "ring_entanglement = " << (ring_entanglement ? 1 : 0) << "\n"
        << "h_prep = " << (h_prep ? 1 : 0) << "\n"
        << "share_attention_register = " << (share_attention_register ? 1 : 0) << "\n"
        << "outdir = " << outdir << "\n";
    return out.str();
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key = value: " + stripped);
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "name") config.name = value;
        else if (key == "model") config.model = value;
        else if (key == "variant") config.variant = value;
        else if (key == "dataset") config.dataset = value;
        else if (key == "window_size") config.window_size = std::stoul(value);
        else if (key == "n_qubits") config.n_qubits = std::stoi(value);
        else if (key == "encoding") config.encoding = value;
        else if (key == "layout") config.layout = value;
        else if (key == "n_layers") config.n_layers = std::stoi(value);
        else if (key == "lr") config.lr = std::stod(value);
        else if (key == "epochs") config.epochs = std::stoul(value);
        else if (key == "train_ratio") config.train_ratio = std::stod(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "hidden") config.hidden = std::stoul(value);
        else if (key == "history") config.history = std::stoul(value);
        else if (key == "top_g") config.top_g = std::stoi(value);
        else if (key == "embedding_dim") config.embedding_dim = std::stoul(value);
        else if (key == "train_fraction") config.train_fraction = std::stod(value);
        else if (key == "val_fraction") config.val_fraction = std::stod(value);
        else if (key == "batch_size") config.batch_size = std::stoul(value);
        else if (key == "max_pairs_per_epoch") config.max_pairs_per_epoch = std::stoul(value);
        else if (key == "max_windows_per_epoch") config.max_windows_per_epoch = std::stoul(value);
        else if (key == "oversample_ratio") config.oversample_ratio = std::stod(value);
        else if (key == "ring_entanglement") config.ring_entanglement = value != "0";
        else if (key == "h_prep") config.h_prep = value != "0";
        else if (key == "share_attention_register") config.share_attention_register = value != "0";
        else if (key == "outdir") config.outdir = value;
        else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str());
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kModels{"deeplog", "loganomaly", "logrobust"};
    static const std::set<std::string> kVariants{"classical", "quantum"};
    if (!kModels.count(model)) {
        throw std::invalid_argument("config: unknown model " + model);
    }
    if (!kVariants.count(variant)) {
        throw std::invalid_argument("config: unknown variant " + variant);
    }
    (void)encode::scheme_from_string(encoding);
    (void)pqc::layout_from_string(layout);
    if (n_qubits < 1 || n_qubits > qsim::kMaxQubits) {
        throw std::invalid_argument("config: n_qubits outside the simulator cap");
    }
    if (n_layers < 1) {
        throw std::invalid_argument("config: n_layers must be positive");
    }
    if (window_size < 2) {
        throw std::invalid_argument("config: window_size must be at least 2");
    }
    if (!(train_ratio > 0.0 && train_ratio <= 1.0)) {
        throw std::invalid_argument("config: train_ratio must lie in (0, 1]");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("config: train_fraction must lie in (0, 1)");
    }
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
        throw std::invalid_argument("config: val_fraction must lie in [0, 1)");
    }
    if (lr <= 0.0) {
        throw std::invalid_argument("config: lr must be positive");
    }
    if (history < 1 || history + 1 > window_size) {
        throw std::invalid_argument("config: history must fit inside a window");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("config: batch_size must be positive");
    }
    if (epochs > 100) {
        throw std::invalid_argument("config: epochs capped at 100");
    }
}

models::ModelConfig ExperimentConfig::model_config(std::size_t vocab_dim) const {
    models::ModelConfig mc;
    mc.kind = models::model_kind_from_string(model);
    mc.quantum = quantum();
    mc.vocab_dim = vocab_dim;
    mc.hidden = hidden;
    mc.history = history;
    mc.top_g = top_g;
    mc.embedding_dim = embedding_dim;
    mc.cell_design = {pqc::layout_from_string(layout), n_qubits, n_layers,
                      encode::scheme_from_string(encoding), ring_entanglement, h_prep};
    mc.attention_design = {pqc::layout_from_string(layout), 8, n_layers,
                           encode::scheme_from_string(encoding), ring_entanglement, h_prep};
    mc.share_attention_register = share_attention_register;
    mc.seed = seed;
    return mc;
}

} // namespace qlogad::harness
