// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

// Command line front end: fig1, param-study, bench, train and certify
// subcommands over a single declarative JSON config. Exit codes: 0 success,
// 1 config error, 2 numerical failure.

#include "wpinn/experiment.hpp"
#include "wpinn/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int level = -1;
  std::string seeds_csv;
  int threads = 0;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the JSON experiment config")->required();
  cmd->add_option("--out", args.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--level", args.level, "Finest level J (overrides the config)");
  cmd->add_option("--seeds", args.seeds_csv, "Comma separated restart seeds (overrides the config)");
  cmd->add_option("--threads", args.threads, "Parallel restarts (overrides the config)");
  cmd->add_flag("--gnuplot", args.gnuplot, "Also write gnuplot companion scripts");
}

wpinn::ExperimentConfig load(const CommonArgs& args) {
  wpinn::ExperimentConfig cfg = wpinn::parse_config_file(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.level > 0) cfg.level = args.level;
  if (args.threads > 0) cfg.train.threads = args.threads;
  if (args.gnuplot) cfg.gnuplot = true;
  if (!args.seeds_csv.empty()) {
    cfg.train.seeds.clear();
    std::size_t at = 0;
    while (at < args.seeds_csv.size()) {
      const std::size_t comma = args.seeds_csv.find(',', at);
      const std::string tok = args.seeds_csv.substr(at, comma - at);
      cfg.train.seeds.push_back(std::stoull(tok));
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
    cfg.train.restarts = static_cast<int>(cfg.train.seeds.size());
    cfg.train.validate();
    cfg.hash = wpinn::fnv1a(cfg.canonical_json + " seeds=" + args.seeds_csv);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("wpinn ") + wpinn::kVersion +
               " - wavelet-certified physics-informed networks for periodic 1D PDEs"};
  app.require_subcommand(1);

  CommonArgs fig1_args, param_args, bench_args, train_args, certify_args;
  std::string model_path;

  CLI::App* fig1 = app.add_subcommand("fig1", "Error-vs-level study over all loss variants");
  add_common(fig1, fig1_args);
  CLI::App* param = app.add_subcommand("param-study", "Parametric study with certification");
  add_common(param, param_args);
  CLI::App* bench = app.add_subcommand("bench", "Loss evaluation timing table");
  add_common(bench, bench_args);
  CLI::App* tr = app.add_subcommand("train", "Train one formulation, write the model file");
  add_common(tr, train_args);
  CLI::App* cert = app.add_subcommand("certify", "Certify a trained model over the parameter grid");
  add_common(cert, certify_args);
  cert->add_option("--model", model_path, "Model file (defaults to the config's model_path)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (fig1->parsed()) {
      const auto path = wpinn::run_fig1(load(fig1_args));
      std::cout << path.string() << "\n";
    } else if (param->parsed()) {
      const auto path = wpinn::run_param_study(load(param_args));
      std::cout << path.string() << "\n";
    } else if (bench->parsed()) {
      const auto path = wpinn::run_bench(load(bench_args));
      std::cout << path.string() << "\n";
    } else if (tr->parsed()) {
      const auto out = wpinn::run_train(load(train_args));
      std::cout << out.model.string() << "\n" << out.log.string() << "\n";
    } else if (cert->parsed()) {
      wpinn::ExperimentConfig cfg = load(certify_args);
      const std::filesystem::path model =
          model_path.empty() ? cfg.model_path : std::filesystem::path(model_path);
      if (model.empty()) {
        std::cerr << "certify: no model file given (--model or config model_path)\n";
        return 1;
      }
      const auto path = wpinn::run_certify(cfg, model);
      std::cout << path.string() << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
