// Command-line front end: parse raw logs, train/evaluate models, run the
// rq1..rq6 experiment sweeps, and report parameter sizes.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "qlogad/harness.hpp"

namespace {

using namespace qlogad;

int cmd_parse(const std::string& input, const std::string& output,
              const std::string& templates_path, const logpipe::DrainConfig& drain_config) {
    logpipe::DrainParser parser(drain_config);
    const auto stream = logpipe::parse_raw_file(input, parser);
    logpipe::write_parsed_csv(output, stream);
    if (!templates_path.empty()) {
        logpipe::write_templates(templates_path, parser.templates());
    }
    std::cout << "parsed " << stream.size() << " lines into " << parser.template_count()
              << " templates -> " << output << "\n";
    return 0;
}

void print_metrics(const harness::ConfusionCounts& counts, const harness::Metrics& metrics) {
    std::cout << std::fixed << std::setprecision(4) << "precision=" << metrics.precision
              << " recall=" << metrics.recall << " specificity=" << metrics.specificity
              << " f1=" << metrics.f1 << "  (tp=" << counts.tp << " fp=" << counts.fp
              << " tn=" << counts.tn << " fn=" << counts.fn << ")\n";
}

int cmd_train(const std::string& config_path, std::string outdir) {
    auto config = harness::ExperimentConfig::from_file(config_path);
    if (!outdir.empty()) {
        config.outdir = outdir;
    }
    std::filesystem::create_directories(config.outdir);
    const auto data = harness::prepare_data(config);
    std::cout << "training " << config.variant << " " << config.model << " on "
              << data.train.size() << " windows (vocab " << data.vocab.size() << ")\n";
    auto trained = harness::train_model(config, data);

    const std::string prefix = config.outdir + "/" + config.name;
    harness::save_model(prefix, trained.model, config, data.vocab, data.templates);
    std::ofstream loss(config.outdir + "/loss_" + config.name + ".csv");
    loss << "epoch,train_loss,val_loss\n";
    for (std::size_t epoch = 0; epoch < trained.losses.size(); ++epoch) {
        loss << (epoch + 1) << ',' << std::setprecision(10) << trained.losses[epoch].train << ','
             << trained.losses[epoch].val << '\n';
    }
    std::cout << "saved checkpoint " << prefix << ".ckpt ("
              << models::format_param_report(trained.model.count_parameters()) << ")\n";

    const auto counts = harness::evaluate_model(trained.model, data.test, data.vocab);
    print_metrics(counts, harness::compute_metrics(counts));
    return 0;
}

int cmd_eval(const std::string& prefix, const std::string& dataset) {
    const auto loaded = harness::load_model(prefix);
    const auto windows =
        harness::load_eval_windows(dataset, loaded.config.window_size, loaded.templates);
    if (windows.empty()) {
        throw std::runtime_error("evaluation dataset yields no full windows");
    }
    std::size_t evaluated = 0, skipped = 0;
    const auto counts =
        harness::evaluate_model(loaded.model, windows, loaded.vocab, &evaluated, &skipped);
    std::cout << "evaluated " << evaluated << " windows";
    if (skipped) {
        std::cout << " (" << skipped << " skipped)";
    }
    std::cout << "\n";
    print_metrics(counts, harness::compute_metrics(counts));
    return 0;
}

int cmd_experiment(const std::string& what, const std::string& outdir,
                   const std::string& dataset_override) {
    std::vector<harness::ExperimentConfig> configs;
    const bool is_preset = what.rfind("rq", 0) == 0 && what.size() == 3;
    if (is_preset) {
        configs = harness::preset(what, dataset_override);
    } else {
        auto config = harness::ExperimentConfig::from_file(what);
        if (!dataset_override.empty()) {
            config.dataset = dataset_override;
        }
        configs.push_back(config);
    }

    std::vector<harness::ExperimentResult> results;
    for (const auto& config : configs) {
        std::cout << "running " << config.name << " ..." << std::flush;
        results.push_back(harness::run_experiment(config));
        const auto& result = results.back();
        std::cout << std::fixed << std::setprecision(4) << " f1=" << result.metrics.f1
                  << " recall=" << result.metrics.recall << " ("
                  << std::setprecision(1) << result.wall_seconds << "s)\n";
    }
    harness::emit_reports(results, outdir);
    std::cout << "reports written to " << outdir << "/\n";
    return 0;
}

int cmd_report_params(const std::string& prefix) {
    const auto loaded = harness::load_model(prefix);
    std::cout << models::format_param_report(loaded.model.count_parameters()) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid quantum-classical log anomaly detection"};
    app.require_subcommand(1);

    // parse
    std::string parse_input, parse_output, parse_templates;
    logpipe::DrainConfig drain_config;
    auto* parse_cmd = app.add_subcommand("parse", "mine templates from a raw log file");
    parse_cmd->add_option("input", parse_input, "raw log file")->required();
    parse_cmd->add_option("-o,--output", parse_output, "parsed CSV path")->required();
    parse_cmd->add_option("--templates", parse_templates, "templates TSV path");
    parse_cmd->add_option("--depth", drain_config.depth, "parse tree depth");
    parse_cmd->add_option("--sim-threshold", drain_config.sim_threshold, "join threshold");
    parse_cmd->add_option("--max-children", drain_config.max_children, "node fanout cap");

    // train
    std::string train_config, train_outdir;
    auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("config", train_config, "experiment config file")->required();
    train_cmd->add_option("-o,--outdir", train_outdir, "output directory override");

    // eval
    std::string eval_prefix, eval_data;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval_cmd->add_option("checkpoint", eval_prefix, "checkpoint prefix (no extension)")
        ->required();
    eval_cmd->add_option("data", eval_data, "raw log, parsed CSV, or synth: URI")->required();

    // experiment
    std::string exp_what, exp_outdir = "runs", exp_dataset;
    auto* exp_cmd = app.add_subcommand("experiment", "run a preset sweep (rq1..rq6) or a config");
    exp_cmd->add_option("what", exp_what, "rqN preset name or config file")->required();
    exp_cmd->add_option("-o,--outdir", exp_outdir, "report directory");
    exp_cmd->add_option("--dataset", exp_dataset, "dataset override");

    // report-params
    std::string report_prefix;
    auto* report_cmd = app.add_subcommand("report-params", "print a checkpoint's parameter size");
    report_cmd->add_option("checkpoint", report_prefix, "checkpoint prefix")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (parse_cmd->parsed()) {
            return cmd_parse(parse_input, parse_output, parse_templates, drain_config);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_config, train_outdir);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_prefix, eval_data);
        }
        if (exp_cmd->parsed()) {
            return cmd_experiment(exp_what, exp_outdir, exp_dataset);
        }
        if (report_cmd->parsed()) {
            return cmd_report_params(report_prefix);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
