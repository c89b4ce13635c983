#include "qlogad/logpipe.hpp"

#include <algorithm>
#include <stdexcept>

namespace qlogad::logpipe {

namespace {

bool has_digits(const std::string& token) {
    return std::any_of(token.begin(), token.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

struct DrainParser::Node {
    std::map<std::string, std::unique_ptr<Node>> children;
    // Leaf payload: template ids grouped under this path, scanned in
    // insertion order.
    std::vector<int> group_ids;
};

DrainParser::DrainParser(DrainConfig config) : config_(config) {
    if (config_.depth < 3) {
        throw std::invalid_argument("drain: depth must be at least 3");
    }
    if (config_.sim_threshold <= 0.0 || config_.sim_threshold >= 1.0) {
        throw std::invalid_argument("drain: sim_threshold must lie in (0, 1)");
    }
    if (config_.max_children < 1) {
        throw std::invalid_argument("drain: max_children must be positive");
    }
    templates_.push_back({}); // reserved id 0: empty content
}

DrainParser::~DrainParser() = default;
DrainParser::DrainParser(DrainParser&&) noexcept = default;
DrainParser& DrainParser::operator=(DrainParser&&) noexcept = default;

int DrainParser::parse(const std::vector<std::string>& tokens) {
    if (tokens.empty()) {
        return 0;
    }
    auto& root = by_length_[tokens.size()];
    if (!root) {
        root = std::make_unique<Node>();
    }
    Node* node = root.get();

    // Internal levels route on the leading tokens; tokens containing
    // digits share the wildcard branch.
    const std::size_t levels =
        std::min<std::size_t>(static_cast<std::size_t>(config_.depth - 2), tokens.size());
    for (std::size_t level = 0; level < levels; ++level) {
        const std::string key = has_digits(tokens[level]) ? kWildcard : tokens[level];
        auto it = node->children.find(key);
        if (it == node->children.end()) {
            if (node->children.size() >= static_cast<std::size_t>(config_.max_children) &&
                key != kWildcard) {
                it = node->children.find(kWildcard);
                if (it == node->children.end()) {
                    it = node->children.emplace(kWildcard, std::make_unique<Node>()).first;
                }
            } else {
                it = node->children.emplace(key, std::make_unique<Node>()).first;
            }
        }
        node = it->second.get();
    }

    // Best group by exact-token similarity.
    int best_id = -1;
    double best_sim = -1.0;
    for (int id : node->group_ids) {
        const auto& pattern = templates_[static_cast<std::size_t>(id)];
        std::size_t equal = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (pattern[i] == tokens[i]) {
                ++equal;
            }
        }
        const double sim = static_cast<double>(equal) / static_cast<double>(tokens.size());
        if (sim > best_sim) {
            best_sim = sim;
            best_id = id;
        }
    }

    if (best_id >= 0 && best_sim >= config_.sim_threshold) {
        auto& pattern = templates_[static_cast<std::size_t>(best_id)];
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (pattern[i] != tokens[i]) {
                pattern[i] = kWildcard;
            }
        }
        return best_id;
    }

    const int id = static_cast<int>(templates_.size());
    templates_.push_back(tokens);
    node->group_ids.push_back(id);
    return id;
}

bool DrainParser::matches(const std::vector<std::string>& pattern,
                          const std::vector<std::string>& tokens) {
    if (pattern.size() != tokens.size()) {
        return false;
    }
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != kWildcard && pattern[i] != tokens[i]) {
            return false;
        }
    }
    return true;
}

int match_frozen(const std::vector<std::vector<std::string>>& templates,
                 const std::vector<std::string>& tokens) {
    if (tokens.empty()) {
        return templates.empty() ? -1 : 0;
    }
    for (std::size_t id = 1; id < templates.size(); ++id) {
        if (DrainParser::matches(templates[id], tokens)) {
            return static_cast<int>(id);
        }
    }
    return -1;
}

} // namespace qlogad::logpipe
