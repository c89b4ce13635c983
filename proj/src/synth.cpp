#include "qlogad/harness.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qlogad::harness {

namespace {

std::string event_word(int index) {
    // Alphabetic names keep each event on its own parse-tree branch.
    std::string word = "ev";
    word.push_back(static_cast<char>('a' + (index / 26) % 26));
    word.push_back(static_cast<char>('a' + index % 26));
    return word;
}

} // namespace

std::vector<std::string> generate_synthetic_log(const SynthSpec& spec) {
    if (spec.cycle_events < 2 || spec.window_size < 8 || spec.n_windows == 0) {
        throw std::invalid_argument("synthetic spec: degenerate corpus");
    }
    if (spec.burst_min < 1 || spec.burst_max < spec.burst_min ||
        spec.burst_max + 4 > spec.window_size) {
        throw std::invalid_argument("synthetic spec: burst does not fit the window");
    }
    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution is_anomalous(spec.anomaly_rate);
    std::uniform_int_distribution<std::size_t> burst_len(spec.burst_min, spec.burst_max);

    std::vector<std::string> lines;
    lines.reserve(spec.n_windows * spec.window_size);
    long long timestamp = 1'000'000;
    std::size_t cycle_pos = 0;
    std::size_t counter = 0;
    for (std::size_t w = 0; w < spec.n_windows; ++w) {
        std::size_t burst_start = spec.window_size; // none
        std::size_t burst_end = spec.window_size;
        if (is_anomalous(rng)) {
            const std::size_t len = burst_len(rng);
            // The burst always ends in the second half of the window, so at
            // least one fault line sits in the predicted region.
            const std::size_t lo = spec.window_size / 2 > len ? spec.window_size / 2 - len : 2;
            const std::size_t hi = spec.window_size - len - 2;
            std::uniform_int_distribution<std::size_t> start(lo, hi);
            burst_start = start(rng);
            burst_end = burst_start + len;
        }
        for (std::size_t i = 0; i < spec.window_size; ++i) {
            std::ostringstream line;
            if (i >= burst_start && i < burst_end) {
                line << "FAILURE " << timestamp << " fault kernel panic code " << counter;
            } else {
                line << "- " << timestamp << ' '
                     << event_word(static_cast<int>(cycle_pos % spec.cycle_events))
                     << " service heartbeat seq " << counter;
            }
            lines.push_back(line.str());
            ++timestamp;
            ++cycle_pos; // the cycle keeps advancing under a burst
            ++counter;
        }
    }
    return lines;
}

void write_synthetic_log(const std::string& path, const SynthSpec& spec) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (const std::string& line : generate_synthetic_log(spec)) {
        out << line << '\n';
    }
}

bool is_synth_uri(const std::string& dataset) {
    return dataset.rfind("synth:", 0) == 0;
}

SynthSpec parse_synth_uri(const std::string& dataset) {
    if (!is_synth_uri(dataset)) {
        throw std::invalid_argument("not a synth: dataset URI: " + dataset);
    }
    SynthSpec spec;
    std::istringstream in(dataset.substr(6));
    std::string field;
    while (std::getline(in, field, ',')) {
        if (field.empty()) {
            continue;
        }
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("synth URI field without '=': " + field);
        }
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "windows") spec.n_windows = std::stoul(value);
        else if (key == "window") spec.window_size = std::stoul(value);
        else if (key == "events") spec.cycle_events = std::stoi(value);
        else if (key == "rate") spec.anomaly_rate = std::stod(value);
        else if (key == "burst_min") spec.burst_min = std::stoul(value);
        else if (key == "burst_max") spec.burst_max = std::stoul(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else {
            throw std::invalid_argument("unknown synth URI key: " + key);
        }
    }
    return spec;
}

} // namespace qlogad::harness
