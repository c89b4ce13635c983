#include "qlogad/logpipe.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qlogad::logpipe {

namespace {

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.emplace_back(text.substr(start, i - start));
        }
    }
    return tokens;
}

bool parse_ll(const std::string& token, long long& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

RawLogLine parse_raw_line(std::string_view line, std::size_t line_no) {
    RawLogLine record;
    record.line_no = line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) {
        throw std::invalid_argument("raw log line " + std::to_string(line_no) +
                                    " has no label field");
    }
    record.alert = tokens[0] != "-";
    std::size_t content_start = 1;
    if (tokens.size() > 1 && parse_ll(tokens[1], record.timestamp)) {
        record.timestamp_valid = true;
        content_start = 2;
    } else {
        // Fall back to the line number as the ordering key.
        record.timestamp = static_cast<long long>(line_no);
    }
    record.content.assign(tokens.begin() + static_cast<std::ptrdiff_t>(content_start),
                          tokens.end());
    return record;
}

EventStream parse_raw_lines(const std::vector<std::string>& lines, DrainParser& parser) {
    std::vector<RawLogLine> records;
    records.reserve(lines.size());
    bool all_timestamps = true;
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        records.push_back(parse_raw_line(line, line_no));
        all_timestamps = all_timestamps && records.back().timestamp_valid;
    }
    if (all_timestamps) {
        std::stable_sort(records.begin(), records.end(),
                         [](const RawLogLine& a, const RawLogLine& b) {
                             return a.timestamp < b.timestamp;
                         });
    }
    EventStream stream;
    stream.event_ids.reserve(records.size());
    stream.alerts.reserve(records.size());
    for (const RawLogLine& record : records) {
        stream.event_ids.push_back(parser.parse(record.content));
        stream.alerts.push_back(record.alert ? 1 : 0);
    }
    return stream;
}

EventStream parse_raw_file(const std::string& path, DrainParser& parser) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open log file " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return parse_raw_lines(lines, parser);
}

void write_parsed_csv(const std::string& path, const EventStream& stream) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << "origin_index,label,event_id\n";
    for (std::size_t i = 0; i < stream.size(); ++i) {
        out << i << ',' << static_cast<int>(stream.alerts[i]) << ',' << stream.event_ids[i]
            << '\n';
    }
}

EventStream load_parsed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open parsed CSV " + path);
    }
    EventStream stream;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (first && line.rfind("origin_index", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string origin, label, event;
        if (!std::getline(row, origin, ',') || !std::getline(row, label, ',') ||
            !std::getline(row, event, ',')) {
            throw std::runtime_error(path + ": malformed CSV row at line " +
                                     std::to_string(line_no));
        }
        stream.alerts.push_back(static_cast<char>(std::stoi(label) != 0 ? 1 : 0));
        stream.event_ids.push_back(std::stoi(event));
    }
    return stream;
}

void write_templates(const std::string& path,
                     const std::vector<std::vector<std::string>>& templates) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (std::size_t id = 0; id < templates.size(); ++id) {
        out << id << '\t';
        for (std::size_t i = 0; i < templates[id].size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << templates[id][i];
        }
        out << '\n';
    }
}

std::vector<std::vector<std::string>> load_templates(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open templates file " + path);
    }
    std::vector<std::vector<std::string>> templates;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("templates file row without a tab: " + line);
        }
        const std::size_t id = static_cast<std::size_t>(std::stoul(line.substr(0, tab)));
        if (id != templates.size()) {
            throw std::runtime_error("templates file ids must be dense from 0");
        }
        templates.push_back(split_ws(line.substr(tab + 1)));
    }
    return templates;
}

std::vector<WindowedSample> windowize(const EventStream& stream, std::size_t window_size) {
    if (window_size < 2) {
        throw std::invalid_argument("windowize: window_size must be at least 2");
    }
    std::vector<WindowedSample> samples;
    if (stream.size() < window_size) {
        std::cerr << "warning: " << stream.size() << " events do not fill a window of "
                  << window_size << "\n";
        return samples;
    }
    const std::size_t full = stream.size() / window_size;
    samples.reserve(full);
    for (std::size_t w = 0; w < full; ++w) {
        WindowedSample sample;
        sample.origin = w;
        sample.events.assign(
            stream.event_ids.begin() + static_cast<std::ptrdiff_t>(w * window_size),
            stream.event_ids.begin() + static_cast<std::ptrdiff_t>((w + 1) * window_size));
        int label = 0;
        for (std::size_t i = w * window_size; i < (w + 1) * window_size; ++i) {
            label |= stream.alerts[i];
        }
        sample.label = label;
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::pair<std::vector<WindowedSample>, std::vector<WindowedSample>>
chronological_split(const std::vector<WindowedSample>& samples, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("chronological_split: fraction must lie in (0, 1)");
    }
    const auto cut = static_cast<std::size_t>(
        std::floor(static_cast<double>(samples.size()) * train_fraction));
    std::vector<WindowedSample> train(samples.begin(),
                                      samples.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<WindowedSample> test(samples.begin() + static_cast<std::ptrdiff_t>(cut),
                                     samples.end());
    return {std::move(train), std::move(test)};
}

std::vector<WindowedSample> subsample_training(const std::vector<WindowedSample>& train,
                                               double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("subsample_training: ratio must lie in (0, 1]");
    }
    if (ratio == 1.0) {
        return train;
    }
    const auto want = static_cast<std::size_t>(
        std::ceil(static_cast<double>(train.size()) * ratio));
    if (want == 0 || train.empty()) {
        throw std::runtime_error("subsample_training: empty result");
    }
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(want);
    std::sort(order.begin(), order.end()); // restore chronological order
    std::vector<WindowedSample> subset;
    subset.reserve(want);
    for (std::size_t idx : order) {
        subset.push_back(train[idx]);
    }
    return subset;
}

std::vector<WindowedSample> filter_normal(const std::vector<WindowedSample>& train) {
    std::vector<WindowedSample> normals;
    for (const WindowedSample& sample : train) {
        if (sample.label == 0) {
            normals.push_back(sample);
        }
    }
    if (normals.empty()) {
        throw std::runtime_error("filter_normal: no normal windows to train on");
    }
    return normals;
}

std::vector<WindowedSample> oversample_anomalies(const std::vector<WindowedSample>& train,
                                                 double target_ratio, std::uint64_t seed) {
    if (target_ratio <= 0.0) {
        throw std::invalid_argument("oversample_anomalies: ratio must be positive");
    }
    std::vector<std::size_t> anomaly_idx;
    std::size_t normal_count = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].label == 1) {
            anomaly_idx.push_back(i);
        } else {
            ++normal_count;
        }
    }
    if (anomaly_idx.empty()) {
        throw std::runtime_error("oversample_anomalies: no anomalous windows in the training set");
    }
    const auto want = static_cast<std::size_t>(
        std::ceil(static_cast<double>(normal_count) * target_ratio));
    std::vector<WindowedSample> out = train;
    if (anomaly_idx.size() >= want) {
        return out;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, anomaly_idx.size() - 1);
    for (std::size_t n = anomaly_idx.size(); n < want; ++n) {
        out.push_back(train[anomaly_idx[pick(rng)]]);
    }
    return out;
}

Vocabulary Vocabulary::build(const std::vector<WindowedSample>& train) {
    Vocabulary vocab;
    for (const WindowedSample& sample : train) {
        for (int id : sample.events) {
            vocab.index_.emplace(id, 0);
        }
    }
    vocab.ids_.reserve(vocab.index_.size());
    int next = 0;
    for (auto& [id, index] : vocab.index_) {
        index = next++;
        vocab.ids_.push_back(id);
    }
    return vocab;
}

int Vocabulary::index_of(int template_id) const {
    const auto it = index_.find(template_id);
    return it == index_.end() ? oov() : it->second;
}

std::vector<int> Vocabulary::map_window(const std::vector<int>& template_ids) const {
    std::vector<int> mapped(template_ids.size());
    for (std::size_t i = 0; i < template_ids.size(); ++i) {
        mapped[i] = index_of(template_ids[i]);
    }
    return mapped;
}

std::string Vocabulary::serialize() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << ids_[i];
    }
    return out.str();
}

Vocabulary Vocabulary::deserialize(const std::string& text) {
    Vocabulary vocab;
    std::istringstream in(text);
    std::string token;
    int next = 0;
    while (std::getline(in, token, ',')) {
        if (token.empty()) {
            continue;
        }
        const int id = std::stoi(token);
        vocab.ids_.push_back(id);
        vocab.index_[id] = next++;
    }
    return vocab;
}

std::vector<nn::Vec> vectorize(const WindowedSample& sample, const Vocabulary& vocab,
                               VectorScheme scheme, std::size_t history) {
    const std::size_t dim = vocab.dim();
    std::vector<nn::Vec> out;
    out.reserve(sample.events.size());
    for (std::size_t t = 0; t < sample.events.size(); ++t) {
        const int idx = vocab.index_of(sample.events[t]);
        switch (scheme) {
        case VectorScheme::OneHot: {
            nn::Vec v(dim, 0.0);
            v[static_cast<std::size_t>(idx)] = 1.0;
            out.push_back(std::move(v));
            break;
        }
        case VectorScheme::Count: {
            // Counts over the preceding `history` events, inclusive.
            nn::Vec v(dim, 0.0);
            const std::size_t start = t + 1 > history ? t + 1 - history : 0;
            for (std::size_t s = start; s <= t; ++s) {
                v[static_cast<std::size_t>(vocab.index_of(sample.events[s]))] += 1.0;
            }
            out.push_back(std::move(v));
            break;
        }
        case VectorScheme::EmbeddingIds:
            out.push_back({static_cast<double>(idx)});
            break;
        }
    }
    return out;
}

} // namespace qlogad::logpipe
