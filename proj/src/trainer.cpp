#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qlogad/harness.hpp"

namespace qlogad::harness {

namespace {

bool is_semi_supervised(const ExperimentConfig& config) {
    return config.model != "logrobust";
}

logpipe::EventStream load_event_stream(const ExperimentConfig& config,
                                       std::vector<std::vector<std::string>>* templates) {
    if (config.dataset.empty()) {
        throw std::runtime_error("config: dataset is required");
    }
    if (is_synth_uri(config.dataset)) {
        const auto lines = generate_synthetic_log(parse_synth_uri(config.dataset));
        logpipe::DrainParser parser;
        auto stream = logpipe::parse_raw_lines(lines, parser);
        if (templates) {
            *templates = parser.templates();
        }
        return stream;
    }
    if (config.dataset.size() > 4 &&
        config.dataset.compare(config.dataset.size() - 4, 4, ".csv") == 0) {
        return logpipe::load_parsed_csv(config.dataset);
    }
    logpipe::DrainParser parser;
    auto stream = logpipe::parse_raw_file(config.dataset, parser);
    if (templates) {
        *templates = parser.templates();
    }
    return stream;
}

} // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
    std::vector<std::vector<std::string>> templates;
    const logpipe::EventStream stream = load_event_stream(config, &templates);
    const auto samples = logpipe::windowize(stream, config.window_size);
    if (samples.empty()) {
        throw std::runtime_error("dataset yields no full windows");
    }
    auto [train, test] = logpipe::chronological_split(samples, config.train_fraction);
    if (train.empty() || test.empty()) {
        throw std::runtime_error("dataset split left an empty side");
    }

    PreparedData data;
    // The vocabulary reflects everything historically observable: the
    // training split before any filtering.
    data.vocab = logpipe::Vocabulary::build(train);

    if (is_semi_supervised(config)) {
        train = logpipe::filter_normal(train);
    }
    train = logpipe::subsample_training(train, config.train_ratio, config.seed);

    std::size_t n_val = static_cast<std::size_t>(
        std::floor(static_cast<double>(train.size()) * config.val_fraction));
    if (config.val_fraction > 0.0 && n_val == 0 && train.size() > 1) {
        n_val = 1;
    }
    data.val.assign(train.end() - static_cast<std::ptrdiff_t>(n_val), train.end());
    train.resize(train.size() - n_val);
    if (train.empty()) {
        throw std::runtime_error("validation tail consumed the whole training set");
    }

    if (!is_semi_supervised(config)) {
        train = logpipe::oversample_anomalies(train, config.oversample_ratio, config.seed + 1);
    }
    data.train = std::move(train);
    data.test = std::move(test);
    data.templates = std::move(templates);
    return data;
}

namespace {

struct Pair {
    std::size_t window = 0;
    std::size_t t = 0;
};

std::vector<int> history_of(const std::vector<int>& window, std::size_t t, std::size_t h) {
    return {window.begin() + static_cast<std::ptrdiff_t>(t - h),
            window.begin() + static_cast<std::ptrdiff_t>(t)};
}

// Fixed, seeded subset of at most `cap` items; chronological bias-free.
template <typename T>
std::vector<T> capped_subset(std::vector<T> items, std::size_t cap, std::uint64_t seed) {
    if (cap == 0 || items.size() <= cap) {
        return items;
    }
    std::mt19937_64 rng(seed);
    std::shuffle(items.begin(), items.end(), rng);
    items.resize(cap);
    return items;
}

// Runs fn(i) for i in [0, n) across the worker pool. Callers write
// per-index slots, so the reduction order stays deterministic.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const std::size_t used = std::min(workers, n);
    std::vector<std::future<void>> futures;
    futures.reserve(used);
    for (std::size_t w = 0; w < used; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += used) {
                fn(i);
            }
        }));
    }
    for (auto& f : futures) {
        f.get();
    }
}

struct NetTrainer {
    models::NextEventNet* net = nullptr;
    models::AdamOptimizer adam;
    explicit NetTrainer(models::NextEventNet* n, double lr) : net(n), adam(lr) {}
};

double train_next_event_epoch(std::vector<NetTrainer>& nets,
                              const std::vector<std::vector<int>>& windows,
                              std::vector<Pair> pairs, const ExperimentConfig& config,
                              std::uint64_t epoch_seed) {
    std::mt19937_64 rng(epoch_seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);

    const std::size_t workers = thread_count();
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t begin = 0; begin < pairs.size(); begin += config.batch_size) {
        const std::size_t end = std::min(begin + config.batch_size, pairs.size());
        const std::size_t batch = end - begin;
        for (NetTrainer& trainer : nets) {
            std::vector<models::GradBuffer> buffers;
            buffers.reserve(batch);
            for (std::size_t i = 0; i < batch; ++i) {
                buffers.emplace_back(trainer.net->params());
            }
            std::vector<double> losses(batch, 0.0);
            parallel_for(batch, workers, [&](std::size_t i) {
                const Pair& pair = pairs[begin + i];
                const auto& window = windows[pair.window];
                losses[i] = trainer.net->loss_grad(history_of(window, pair.t, config.history),
                                                   window[pair.t], buffers[i]);
            });
            models::GradBuffer total(trainer.net->params());
            for (const auto& buffer : buffers) {
                total.add(buffer);
            }
            total.scale(1.0 / static_cast<double>(batch));
            total.clip_global_norm(5.0);
            trainer.adam.step(trainer.net->params(), total);
            for (double l : losses) {
                loss_sum += l;
            }
            loss_count += batch;
        }
    }
    return loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
}

double next_event_loss(const std::vector<NetTrainer>& nets,
                       const std::vector<std::vector<int>>& windows,
                       const std::vector<Pair>& pairs, const ExperimentConfig& config) {
    if (pairs.empty()) {
        return 0.0;
    }
    const std::size_t workers = thread_count();
    double total = 0.0;
    for (const NetTrainer& trainer : nets) {
        std::vector<double> losses(pairs.size(), 0.0);
        parallel_for(pairs.size(), workers, [&](std::size_t i) {
            const auto& window = windows[pairs[i].window];
            losses[i] = trainer.net->loss(history_of(window, pairs[i].t, config.history),
                                          window[pairs[i].t]);
        });
        for (double l : losses) {
            total += l;
        }
    }
    return total / (static_cast<double>(pairs.size()) * static_cast<double>(nets.size()));
}

std::vector<Pair> enumerate_pairs(const std::vector<std::vector<int>>& windows,
                                  std::size_t history) {
    std::vector<Pair> pairs;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        if (windows[w].size() < history + 1) {
            continue;
        }
        for (std::size_t t = history; t < windows[w].size(); ++t) {
            pairs.push_back({w, t});
        }
    }
    return pairs;
}

} // namespace

TrainedModel train_model(const ExperimentConfig& config, const PreparedData& data) {
    TrainedModel trained{models::LogAdModel::create(config.model_config(data.vocab.dim())), {}};
    models::LogAdModel& model = trained.model;

    if (model.is_next_event()) {
        std::vector<std::vector<int>> train_windows, val_windows;
        train_windows.reserve(data.train.size());
        for (const auto& sample : data.train) {
            train_windows.push_back(data.vocab.map_window(sample.events));
        }
        for (const auto& sample : data.val) {
            val_windows.push_back(data.vocab.map_window(sample.events));
        }
        const auto train_pairs = capped_subset(enumerate_pairs(train_windows, config.history),
                                               config.max_pairs_per_epoch, config.seed ^ 0x5eed);
        const auto val_pairs = capped_subset(enumerate_pairs(val_windows, config.history),
                                             config.max_pairs_per_epoch, config.seed ^ 0xa17u);
        if (train_pairs.empty()) {
            throw std::runtime_error("no training pairs: windows shorter than history+1");
        }

        std::vector<NetTrainer> nets;
        for (auto& net : model.nets()) {
            nets.emplace_back(net.get(), config.lr);
        }
        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            EpochLoss loss;
            loss.train = train_next_event_epoch(nets, train_windows, train_pairs, config,
                                                config.seed + 1000 + epoch);
            loss.val = next_event_loss(nets, val_windows, val_pairs, config);
            trained.losses.push_back(loss);
        }
        return trained;
    }

    // LogRobust: whole-window supervised training.
    std::vector<std::pair<std::vector<int>, int>> train_windows, val_windows;
    for (const auto& sample : data.train) {
        train_windows.push_back({data.vocab.map_window(sample.events), sample.label});
    }
    for (const auto& sample : data.val) {
        val_windows.push_back({data.vocab.map_window(sample.events), sample.label});
    }
    const auto train_set =
        capped_subset(train_windows, config.max_windows_per_epoch, config.seed ^ 0x5eed);
    const auto val_set =
        capped_subset(val_windows, config.max_windows_per_epoch, config.seed ^ 0xa17u);

    models::LogRobustClassifier& robust = *model.robust();
    models::AdamOptimizer adam(config.lr);
    const std::size_t workers = thread_count();
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::mt19937_64 rng(config.seed + 2000 + epoch);
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            const std::size_t batch = end - begin;
            std::vector<models::GradBuffer> buffers;
            buffers.reserve(batch);
            for (std::size_t i = 0; i < batch; ++i) {
                buffers.emplace_back(robust.params());
            }
            std::vector<double> losses(batch, 0.0);
            parallel_for(batch, workers, [&](std::size_t i) {
                const auto& [window, label] = train_set[order[begin + i]];
                losses[i] = robust.loss_grad(window, label, buffers[i]);
            });
            models::GradBuffer total(robust.params());
            for (const auto& buffer : buffers) {
                total.add(buffer);
            }
            total.scale(1.0 / static_cast<double>(batch));
            total.clip_global_norm(5.0);
            adam.step(robust.params(), total);
            for (double l : losses) {
                loss_sum += l;
            }
            loss_count += batch;
        }
        EpochLoss loss;
        loss.train = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
        if (!val_set.empty()) {
            std::vector<double> losses(val_set.size(), 0.0);
            parallel_for(val_set.size(), workers, [&](std::size_t i) {
                losses[i] = robust.loss(val_set[i].first, val_set[i].second);
            });
            loss.val = std::accumulate(losses.begin(), losses.end(), 0.0) /
                       static_cast<double>(val_set.size());
        }
        trained.losses.push_back(loss);
    }
    return trained;
}

ConfusionCounts evaluate_model(const models::LogAdModel& model,
                               const std::vector<logpipe::WindowedSample>& test,
                               const logpipe::Vocabulary& vocab, std::size_t* evaluated,
                               std::size_t* skipped) {
    ConfusionCounts counts;
    std::size_t used = 0, dropped = 0;
    std::vector<models::LogitsCache> caches(model.nets().size());
    for (const auto& sample : test) {
        const auto verdict = model.detect(vocab.map_window(sample.events), &caches);
        if (!verdict.has_value()) {
            ++dropped;
            continue;
        }
        ++used;
        const bool anomaly = *verdict;
        if (anomaly && sample.label == 1) {
            ++counts.tp;
        } else if (anomaly && sample.label == 0) {
            ++counts.fp;
        } else if (!anomaly && sample.label == 1) {
            ++counts.fn;
        } else {
            ++counts.tn;
        }
    }
    if (evaluated) {
        *evaluated = used;
    }
    if (skipped) {
        *skipped = dropped;
    }
    return counts;
}

} // namespace qlogad::harness
