#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qlogad/nn.hpp"

namespace qlogad::logpipe {

// ---- raw lines ------------------------------------------------------------

/// One input record: `label [timestamp] content...`. A "-" label marks a
/// non-alert line; anything else is an alert.
struct RawLogLine {
    bool alert = false;
    long long timestamp = 0;
    bool timestamp_valid = false;
    std::vector<std::string> content;
    std::size_t line_no = 0;
};

RawLogLine parse_raw_line(std::string_view line, std::size_t line_no);

// ---- Drain template mining --------------------------------------------------

struct DrainConfig {
    int depth = 4;              // tree depth; depth-2 internal token levels
    double sim_threshold = 0.4; // join threshold on exact-token similarity
    int max_children = 100;     // per-node fanout before the wildcard branch
};

/// Fixed-depth parse tree keyed by token count, then leading tokens.
/// Template id 0 is reserved for empty content. Deterministic for a fixed
/// line order.
class DrainParser {
public:
    explicit DrainParser(DrainConfig config = {});
    ~DrainParser();
    DrainParser(DrainParser&&) noexcept;
    DrainParser& operator=(DrainParser&&) noexcept;

    /// Assigns (and learns) the template for one tokenized line.
    int parse(const std::vector<std::string>& tokens);

    const std::vector<std::vector<std::string>>& templates() const { return templates_; }
    std::size_t template_count() const { return templates_.size(); }

    /// Wildcard-aware exact match of a frozen pattern against tokens.
    static bool matches(const std::vector<std::string>& pattern,
                        const std::vector<std::string>& tokens);

    static constexpr const char* kWildcard = "<*>";

private:
    struct Node;
    DrainConfig config_;
    std::vector<std::vector<std::string>> templates_;
    std::map<std::size_t, std::unique_ptr<Node>> by_length_;
};

/// First frozen template matching the tokens, or -1 (use at evaluation
/// time against a trained template set).
int match_frozen(const std::vector<std::vector<std::string>>& templates,
                 const std::vector<std::string>& tokens);

// ---- parsed event streams ---------------------------------------------------

struct EventStream {
    std::vector<int> event_ids;
    std::vector<char> alerts;
    std::size_t size() const { return event_ids.size(); }
};

/// Parses a raw log file through Drain. Lines are ordered by timestamp when
/// all timestamps parse (stable sort), otherwise by line number.
EventStream parse_raw_file(const std::string& path, DrainParser& parser);
EventStream parse_raw_lines(const std::vector<std::string>& lines, DrainParser& parser);

/// `origin_index,label,event_id` CSV round trip.
void write_parsed_csv(const std::string& path, const EventStream& stream);
EventStream load_parsed_csv(const std::string& path);

/// `template_id<TAB>pattern` round trip.
void write_templates(const std::string& path,
                     const std::vector<std::vector<std::string>>& templates);
std::vector<std::vector<std::string>> load_templates(const std::string& path);

// ---- windows ---------------------------------------------------------------

struct WindowedSample {
    std::vector<int> events;
    int label = 0; // 1 when any member line was an alert
    std::size_t origin = 0;
};

/// Tumbling windows of exactly window_size events; the tail remainder is
/// dropped. Emits a warning when the stream is shorter than one window.
std::vector<WindowedSample> windowize(const EventStream& stream, std::size_t window_size = 100);

std::pair<std::vector<WindowedSample>, std::vector<WindowedSample>>
chronological_split(const std::vector<WindowedSample>& samples, double train_fraction = 0.8);

/// Seeded uniform subset of ceil(N * ratio) samples, order restored to
/// chronological.
std::vector<WindowedSample> subsample_training(const std::vector<WindowedSample>& train,
                                               double ratio, std::uint64_t seed);

/// Keeps label == 0 only; throws when nothing remains.
std::vector<WindowedSample> filter_normal(const std::vector<WindowedSample>& train);

/// Duplicates anomalous samples (seeded cycling) until
/// anomalies : normals >= target_ratio.
std::vector<WindowedSample> oversample_anomalies(const std::vector<WindowedSample>& train,
                                                 double target_ratio, std::uint64_t seed);

// ---- vocabulary and vectorization -------------------------------------------

/// Dense template-id -> model-index map built from training windows only.
/// Unseen ids map to the OOV index (= size()).
class Vocabulary {
public:
    static Vocabulary build(const std::vector<WindowedSample>& train);

    int index_of(int template_id) const;
    std::size_t size() const { return ids_.size(); } // without the OOV slot
    std::size_t dim() const { return ids_.size() + 1; }
    int oov() const { return static_cast<int>(ids_.size()); }
    const std::vector<int>& template_ids() const { return ids_; }

    std::vector<int> map_window(const std::vector<int>& template_ids) const;

    std::string serialize() const;
    static Vocabulary deserialize(const std::string& text);

private:
    std::vector<int> ids_; // ascending template ids
    std::map<int, int> index_;
};

enum class VectorScheme { OneHot, Count, EmbeddingIds };

/// Per-position vectors for one sample under the chosen scheme. OneHot
/// yields |V|+1 indicators; Count yields cumulative event counts over the
/// preceding events of the history window; EmbeddingIds passes indices
/// through as single-entry vectors.
std::vector<nn::Vec> vectorize(const WindowedSample& sample, const Vocabulary& vocab,
                               VectorScheme scheme, std::size_t history);

} // namespace qlogad::logpipe
