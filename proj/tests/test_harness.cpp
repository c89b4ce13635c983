#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "qlogad/harness.hpp"

using namespace qlogad;
using harness::ConfusionCounts;
using harness::ExperimentConfig;

namespace {

// Independent recount: metrics straight from prediction/label vectors.
harness::Metrics brute_force_metrics(const std::vector<int>& predicted,
                                     const std::vector<int>& actual) {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1 && actual[i] == 1) ++tp;
        if (predicted[i] == 1 && actual[i] == 0) ++fp;
        if (predicted[i] == 0 && actual[i] == 0) ++tn;
        if (predicted[i] == 0 && actual[i] == 1) ++fn;
    }
    harness::Metrics m;
    m.precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    m.recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    m.specificity = tn + fp ? double(tn) / double(tn + fp) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
    return m;
}

ExperimentConfig tiny_config() {
    ExperimentConfig config;
    config.name = "tiny";
    config.model = "deeplog";
    config.variant = "classical";
    config.dataset = "synth:windows=40,window=30,events=8,rate=0.15,burst_min=3,burst_max=5,seed=3";
    config.window_size = 30;
    config.history = 5;
    config.epochs = 2;
    config.lr = 0.01;
    config.max_pairs_per_epoch = 120;
    config.batch_size = 4;
    config.seed = 5;
    return config;
}

} // namespace

TEST_CASE("compute_metrics formulas and conventions") {
    const auto m = harness::compute_metrics({9, 1, 89, 1});
    CHECK(m.precision == doctest::Approx(0.9));
    CHECK(m.recall == doctest::Approx(0.9));
    CHECK(m.specificity == doctest::Approx(89.0 / 90.0));
    CHECK(m.f1 == doctest::Approx(0.9));

    const auto perfect = harness::compute_metrics({10, 0, 90, 0});
    CHECK(perfect.precision == doctest::Approx(1.0));
    CHECK(perfect.recall == doctest::Approx(1.0));
    CHECK(perfect.specificity == doctest::Approx(1.0));
    CHECK(perfect.f1 == doctest::Approx(1.0));

    const auto degenerate = harness::compute_metrics({0, 0, 5, 3});
    CHECK(degenerate.precision == 0.0);
    CHECK(degenerate.f1 == 0.0);
}

TEST_CASE("compute_metrics equals a brute-force recount on random vectors") {
    std::mt19937_64 rng(1);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> predicted(50), actual(50);
        ConfusionCounts counts;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            predicted[i] = coin(rng) ? 1 : 0;
            actual[i] = coin(rng) ? 1 : 0;
            if (predicted[i] && actual[i]) ++counts.tp;
            else if (predicted[i] && !actual[i]) ++counts.fp;
            else if (!predicted[i] && actual[i]) ++counts.fn;
            else ++counts.tn;
        }
        const auto fast = harness::compute_metrics(counts);
        const auto slow = brute_force_metrics(predicted, actual);
        CHECK(fast.precision == slow.precision);
        CHECK(fast.recall == slow.recall);
        CHECK(fast.specificity == slow.specificity);
        CHECK(fast.f1 == slow.f1);
        CHECK(fast.precision >= 0.0);
        CHECK(fast.precision <= 1.0);
        CHECK(fast.f1 >= 0.0);
        CHECK(fast.f1 <= 1.0);
    }
}

TEST_CASE("experiment config text round trip and validation") {
    ExperimentConfig config = tiny_config();
    config.encoding = "angle_rz";
    config.layout = "ryrx";
    config.train_ratio = 0.5;
    const auto restored = ExperimentConfig::from_text(config.to_text());
    CHECK(restored.name == config.name);
    CHECK(restored.model == config.model);
    CHECK(restored.encoding == config.encoding);
    CHECK(restored.layout == config.layout);
    CHECK(restored.train_ratio == doctest::Approx(config.train_ratio));
    CHECK(restored.max_pairs_per_epoch == config.max_pairs_per_epoch);

    CHECK_THROWS_AS(ExperimentConfig::from_text("model = svm\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_text("bogus_key = 1\n"), std::invalid_argument);
    ExperimentConfig bad = tiny_config();
    bad.epochs = 101;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = tiny_config();
    bad.train_ratio = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("synthetic corpus structure") {
    harness::SynthSpec spec;
    spec.n_windows = 30;
    spec.window_size = 50;
    spec.cycle_events = 10;
    spec.anomaly_rate = 0.2;
    spec.burst_min = 3;
    spec.burst_max = 6;
    spec.seed = 21;

    const auto lines = harness::generate_synthetic_log(spec);
    CHECK(lines.size() == 30 * 50);
    CHECK(lines == harness::generate_synthetic_log(spec)); // deterministic

    logpipe::DrainParser parser;
    const auto stream = logpipe::parse_raw_lines(lines, parser);
    // Reserved empty + one template per cycle event + one fault template.
    CHECK(parser.template_count() == 1 + 10 + 1);

    const auto windows = logpipe::windowize(stream, spec.window_size);
    REQUIRE(windows.size() == 30);
    std::size_t anomalous = 0;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        bool any_alert = false;
        for (std::size_t i = 0; i < spec.window_size; ++i) {
            any_alert = any_alert || lines[w * spec.window_size + i].rfind("FAILURE", 0) == 0;
        }
        CHECK(windows[w].label == (any_alert ? 1 : 0));
        anomalous += static_cast<std::size_t>(windows[w].label);
    }
    CHECK(anomalous > 0);
    CHECK(anomalous < windows.size());
}

TEST_CASE("synth URI parsing") {
    CHECK(harness::is_synth_uri("synth:windows=5"));
    CHECK_FALSE(harness::is_synth_uri("logs/bgl.log"));
    const auto spec = harness::parse_synth_uri(
        "synth:windows=123,window=40,events=9,rate=0.25,burst_min=2,burst_max=4,seed=99");
    CHECK(spec.n_windows == 123);
    CHECK(spec.window_size == 40);
    CHECK(spec.cycle_events == 9);
    CHECK(spec.anomaly_rate == doctest::Approx(0.25));
    CHECK(spec.seed == 99);
    CHECK_THROWS_AS(harness::parse_synth_uri("synth:bogus=1"), std::invalid_argument);
}

TEST_CASE("prepare_data wiring: split, filtering, validation tail") {
    const ExperimentConfig config = tiny_config();
    const auto data = harness::prepare_data(config);
    CHECK(data.test.size() == 8); // 40 windows, 0.8 split
    for (const auto& sample : data.train) {
        CHECK(sample.label == 0); // semi-supervised filtering
    }
    CHECK(!data.val.empty());
    // Validation tail is chronologically last.
    if (!data.train.empty() && !data.val.empty()) {
        CHECK(data.train.back().origin < data.val.front().origin);
    }
    CHECK(data.vocab.size() >= 8);
}

TEST_CASE("run_experiment: deterministic rows, populated fields, epochs=0") {
    const ExperimentConfig config = tiny_config();
    const auto a = harness::run_experiment(config);
    const auto b = harness::run_experiment(config);
    CHECK(harness::results_csv_row(a) == harness::results_csv_row(b));
    CHECK(a.losses.size() == 2);
    CHECK(a.counts.total() == a.evaluated_windows);
    CHECK(a.classical_bits > 0);
    CHECK(a.qubit_count == 0);

    ExperimentConfig untrained = tiny_config();
    untrained.epochs = 0;
    const auto result = harness::run_experiment(untrained);
    CHECK(result.losses.empty());
    CHECK(result.counts.total() > 0);
    CHECK(result.metrics.recall >= 0.0);
    CHECK(result.metrics.recall <= 1.0);
}

TEST_CASE("run_experiment rejects contradictory configs") {
    ExperimentConfig config = tiny_config();
    config.dataset = "no_such_file.log";
    CHECK_THROWS(harness::run_experiment(config));
}

TEST_CASE("presets expand to the sweep grids") {
    const auto rq2 = harness::preset("rq2");
    CHECK(rq2.size() == 8);
    std::set<std::string> encodings;
    for (const auto& config : rq2) {
        encodings.insert(config.encoding);
        CHECK(config.variant == "quantum");
    }
    CHECK(encodings == std::set<std::string>{"angle_rx", "angle_ry", "angle_rz", "amplitude"});

    const auto rq3 = harness::preset("rq3");
    std::set<int> qubits;
    for (const auto& config : rq3) {
        qubits.insert(config.n_qubits);
    }
    CHECK(qubits == std::set<int>{4, 6, 8});

    const auto rq4 = harness::preset("rq4");
    std::set<std::string> layouts;
    for (const auto& config : rq4) {
        layouts.insert(config.layout);
    }
    CHECK(layouts == std::set<std::string>{"rx", "rxry", "ryrx", "rz"});

    const auto rq5 = harness::preset("rq5");
    std::set<double> ratios;
    for (const auto& config : rq5) {
        ratios.insert(config.train_ratio);
    }
    CHECK(ratios == std::set<double>{0.01, 0.1, 0.5, 1.0});
    CHECK(rq5.size() == 16);

    const auto rq6 = harness::preset("rq6");
    CHECK(rq6.size() == 6);
    for (const auto& config : rq6) {
        CHECK(config.epochs == 100);
    }

    CHECK(harness::preset("rq1", "synth:windows=50").front().dataset == "synth:windows=50");
    CHECK_THROWS_AS(harness::preset("rq7"), std::invalid_argument);
}

TEST_CASE("csv rows quote comma-bearing fields and keep the column count") {
    harness::ExperimentResult result;
    result.config = tiny_config(); // synth: dataset carries commas
    const std::string row = harness::results_csv_row(result);

    // Count columns with quote-aware splitting.
    std::size_t columns = 1;
    bool quoted = false;
    for (char c : row) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            ++columns;
        }
    }
    std::size_t header_columns = 1;
    for (char c : harness::results_csv_header()) {
        header_columns += c == ',';
    }
    CHECK(columns == header_columns);
    CHECK(row.find('"') != std::string::npos);
}

TEST_CASE("emit_reports writes results.csv, loss files and the text table") {
    const ExperimentConfig config = tiny_config();
    const auto result = harness::run_experiment(config);
    const std::string outdir = "test_harness_reports";
    harness::emit_reports({result}, outdir);

    std::ifstream csv(outdir + "/results.csv");
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);
    CHECK(line == harness::results_csv_header());
    std::getline(csv, line);
    CHECK(line == harness::results_csv_row(result));

    std::ifstream loss(outdir + "/loss_tiny.csv");
    REQUIRE(loss.good());
    std::getline(loss, line); // header
    std::size_t rows = 0;
    while (std::getline(loss, line)) {
        rows += !line.empty();
    }
    CHECK(rows == config.epochs);

    std::ifstream table(outdir + "/table.txt");
    REQUIRE(table.good());
    bool has_bit_line = false;
    while (std::getline(table, line)) {
        has_bit_line = has_bit_line || line.find(" bit") != std::string::npos;
    }
    CHECK(has_bit_line);

    std::filesystem::remove_all(outdir);
}

TEST_CASE("model checkpoints reload to identical evaluations") {
    ExperimentConfig config = tiny_config();
    config.epochs = 1;
    const auto data = harness::prepare_data(config);
    auto trained = harness::train_model(config, data);
    const auto before = harness::evaluate_model(trained.model, data.test, data.vocab);

    const std::string prefix = "test_harness_model";
    harness::save_model(prefix, trained.model, config, data.vocab);
    auto loaded = harness::load_model(prefix);
    const auto after = harness::evaluate_model(loaded.model, data.test, loaded.vocab);
    CHECK(before.tp == after.tp);
    CHECK(before.fp == after.fp);
    CHECK(before.tn == after.tn);
    CHECK(before.fn == after.fn);
    std::filesystem::remove(prefix + ".ckpt");
    std::filesystem::remove(prefix + ".meta");
}

TEST_CASE("thread pool size comes from the environment") {
    const char* old = std::getenv("QLOGAD_THREADS");
    const std::string saved = old ? old : "";

    unsetenv("QLOGAD_THREADS");
    CHECK(harness::thread_count() == 1);
    setenv("QLOGAD_THREADS", "3", 1);
    CHECK(harness::thread_count() == 3);
    setenv("QLOGAD_THREADS", "0", 1);
    CHECK(harness::thread_count() == 1);

    if (old) {
        setenv("QLOGAD_THREADS", saved.c_str(), 1);
    } else {
        unsetenv("QLOGAD_THREADS");
    }
}

TEST_CASE("multi-threaded batches still train and evaluate") {
    const char* old = std::getenv("QLOGAD_THREADS");
    const std::string saved = old ? old : "";
    setenv("QLOGAD_THREADS", "2", 1);

    ExperimentConfig config = tiny_config();
    const auto result = harness::run_experiment(config);
    CHECK(result.counts.total() > 0);
    for (const auto& epoch : result.losses) {
        CHECK(std::isfinite(epoch.train));
    }

    if (old) {
        setenv("QLOGAD_THREADS", saved.c_str(), 1);
    } else {
        unsetenv("QLOGAD_THREADS");
    }
}

TEST_CASE("experiments run from a parsed CSV dataset") {
    // Materialize the synthetic corpus as a parsed CSV, then point the
    // pipeline at the CSV instead of raw text.
    logpipe::DrainParser parser;
    const auto lines = harness::generate_synthetic_log(
        harness::parse_synth_uri(tiny_config().dataset.c_str()));
    const auto stream = logpipe::parse_raw_lines(lines, parser);
    const std::string csv = "test_harness_dataset.csv";
    logpipe::write_parsed_csv(csv, stream);

    ExperimentConfig config = tiny_config();
    config.dataset = csv;
    const auto result = harness::run_experiment(config);
    CHECK(result.counts.total() == 8);
    std::remove(csv.c_str());
}
