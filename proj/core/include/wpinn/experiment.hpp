// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file experiment.hpp
/// @brief Declarative experiment configs (JSON) and the batch drivers behind
///        the command line tool: error-vs-level study, parametric study with
///        certification, loss-evaluation timing table, and the standalone
///        train/certify pipeline.

#include "wpinn/certify.hpp"
#include "wpinn/loss.hpp"
#include "wpinn/network.hpp"
#include "wpinn/problems.hpp"
#include "wpinn/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wpinn {

/// Parsed experiment description; fully determines a reproducible run.
struct ExperimentConfig {
  std::string problem_id = "problem1";
  std::filesystem::path out_dir = "out";

  Architecture arch;  ///< resolved default: (1+p, 64, 64, 64, 1), tanh

  std::vector<int> levels = {3, 4, 5, 6, 8, 10};  ///< level sweep (fig1/bench)
  int level = 6;                                  ///< single-level operations

  std::pair<int, int> weak_basis = {2, 2};
  std::pair<int, int> ultraweak_basis = {4, 4};
  int quad_points = 3;

  double omega_b_low = 0.1;
  double omega_b_high = 10.0;

  Formulation formulation = Formulation::Weak;  ///< train/certify subcommands
  LossKind train_kind = LossKind::WaveletWeak;

  TrainConfig train;
  double ultraweak_iter_factor = 2.0;

  int mu_grid_points = 6;
  int constants_level = 8;
  int fem_cells = 1 << 14;
  int bench_repetitions = 20;
  bool gnuplot = false;  ///< also emit companion plot scripts
  std::filesystem::path model_path;

  std::uint64_t hash = 0;       ///< FNV-1a of the canonical JSON
  std::string canonical_json;

  /// Comment lines for output-file headers (version, hash, seeds, bases).
  std::vector<std::string> provenance() const;
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// FNV-1a 64-bit, used for the config hash.
std::uint64_t fnv1a(const std::string& s);

/// Error-vs-level study over all five loss variants; writes
/// <out>/fig1.csv with columns
///   level,wError,wEstError,PINNError01,uwError,EstError,PINNError10,MSEError
/// (mean over restarts; errors in L2). Rows of failed trainings carry NaN.
std::filesystem::path run_fig1(const ExperimentConfig& cfg);

/// Parametric study on the mu grid: one parametric network per wavelet
/// formulation, per-parameter errors against the FEM truth and bounds;
/// writes <out>/param_study.csv with columns
///   NoParam,mu1,mu2,H1Error,EstH1w,L2Erroruw,Estuw
/// (rows enumerate the grid row-major).
std::filesystem::path run_param_study(const ExperimentConfig& cfg);

/// Loss-evaluation timing table over the level sweep (median of
/// bench_repetitions): columns level,ultraweak_s,weak_s,classical_s,nn_s.
std::filesystem::path run_bench(const ExperimentConfig& cfg);

struct TrainOutputs {
  std::filesystem::path model;
  std::filesystem::path log;
  double mean_final_loss = 0;
};

/// Trains the configured formulation, writes the best-restart model and the
/// training log.
TrainOutputs run_train(const ExperimentConfig& cfg);

/// Loads a model file and writes a certificate CSV over the mu grid (or the
/// single nonparametric instance).
std::filesystem::path run_certify(const ExperimentConfig& cfg, const std::filesystem::path& model);

/// Row-major mu grid over the problem's parameter box.
std::vector<std::vector<double>> mu_grid(const ProblemSpec& problem, int points_per_dim);

}  // namespace wpinn
