// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file training.hpp
/// @brief Full-gradient deterministic training with multi-restart averaging:
///        L-BFGS with strong-Wolfe line search (Adam as fallback), restart
///        isolation, and error aggregation against a truth solution.

#include "wpinn/loss.hpp"
#include "wpinn/network.hpp"
#include "wpinn/spectral.hpp"
#include "wpinn/splinequad.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wpinn {

enum class OptimizerKind { Lbfgs, Adam };

struct TrainConfig {
  int restarts = 5;
  int max_iters = 200;
  OptimizerKind optimizer = OptimizerKind::Lbfgs;
  std::vector<std::uint64_t> seeds;  ///< one per restart; defaulted when empty
  double grad_tol = 1e-10;
  int threads = 1;                   ///< parallel restarts
  std::string log_path;              ///< optional CSV: restart,iter,loss,grad_norm,wall_ms

  void validate() const;
  std::vector<std::uint64_t> effective_seeds() const;
};

struct RestartResult {
  std::uint64_t seed = 0;
  Params theta;
  double final_loss = 0;
  int iterations = 0;
  bool failed = false;
  std::string diagnostic;
};

/// Runs the optimizer from each seed for at most max_iters steps (or until
/// the gradient-norm tolerance). A restart whose loss or gradient turns
/// non-finite is aborted with a diagnostic; the others continue.
std::vector<RestartResult> train(const LossFunction& loss, const TrainConfig& cfg);

// --- Generic optimizers (exposed for reuse and testing) -------------------

/// Objective: f(x) with gradient written into g.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

struct OptimOptions {
  int max_iters = 200;
  double grad_tol = 1e-10;
  int memory = 10;       ///< L-BFGS history
  double adam_lr = 1e-3;
};

struct OptimTraceRow {
  int iter;
  double loss;
  double grad_norm;
  double wall_ms;
};

struct OptimResult {
  Eigen::VectorXd x;
  double f = 0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string diagnostic;
  std::vector<OptimTraceRow> trace;
};

/// L-BFGS with strong-Wolfe line search; accepted steps never increase the
/// objective.
OptimResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const OptimOptions& opts);

/// Full-gradient Adam.
OptimResult adam_minimize(const Objective& fn, Eigen::VectorXd x0, const OptimOptions& opts);

// --- Error evaluation ------------------------------------------------------

enum class ErrorNorm { L2, H1 };

/// Truth solution with a derivative (needed for H1 errors).
struct TruthFn {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

/// Piecewise-linear truth from a FEM/spectral grid function.
TruthFn truth_from_grid(const GridFunction& g);

/// || truth - Phi(.; mu) || on the quadrature grid, in the requested norm;
/// with the zero-mean gauge both sides are reduced by their quadrature mean
/// first.
double solution_error(const Architecture& arch, const Params& theta, const TruthFn& truth,
                      const std::vector<double>& mu, const QuadMesh& mesh, ErrorNorm norm,
                      bool zero_mean_gauge);

struct ErrorStats {
  double mean = 0;
  double min_v = 0;
  double max_v = 0;
  std::vector<double> per_restart;
};

/// Mean / min / max over per-restart errors; throws on empty input.
ErrorStats aggregate(const std::vector<double>& per_restart_errors);

}  // namespace wpinn
