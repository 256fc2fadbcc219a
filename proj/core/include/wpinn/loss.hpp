// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file loss.hpp
/// @brief The four training losses - classical pointwise, MSE against a
///        known solution, and the wavelet dual-norm loss in its weak and
///        ultra-weak variants - over finite parameter samples, with exact
///        reverse-mode gradients.

#include "wpinn/formulations.hpp"
#include "wpinn/network.hpp"
#include "wpinn/problems.hpp"
#include "wpinn/splinequad.hpp"
#include "wpinn/wavelet.hpp"

#include <memory>
#include <vector>

namespace wpinn {

enum class LossKind { Classical, Mse, WaveletWeak, WaveletUltraWeak };

std::string to_string(LossKind k);

struct LossConfig {
  LossKind kind = LossKind::WaveletWeak;
  int level = 6;           ///< finest level J (also sizes the quadrature/training grid)
  double omega_b = 10.0;   ///< boundary weight for the classical loss
  int quad_points = 3;     ///< Gauss points per dyadic cell
  std::vector<std::vector<double>> mu_samples = {{}};  ///< S_mu; one empty entry if nonparametric
  std::vector<double> x_samples;  ///< S_x override (classical/mse); default: the quadrature nodes
  WaveletBasis basis;             ///< wavelet kinds only

  /// Dual-norm regularity: 1 (weak) or 2 (ultra-weak).
  int sigma() const;
};

/// A loss bound to a problem, architecture and config. Construction
/// precomputes the quadrature meshes and per-parameter residual assemblers;
/// evaluation and gradients are then pure in theta.
class LossFunction {
 public:
  LossFunction(ProblemSpec problem, Architecture arch, LossConfig cfg);

  double value(const Params& theta) const;
  double value_and_grad(const Params& theta, Params& grad) const;

  const LossConfig& config() const { return cfg_; }
  const ProblemSpec& problem() const { return problem_; }
  const Architecture& architecture() const { return arch_; }

  /// Training point set S_x (the plain dyadic Gauss nodes at the config level).
  const std::vector<double>& training_points() const { return x_points_; }
  /// Quadrature rule backing S_x (also used for means and error norms).
  const QuadMesh& training_mesh() const { return plain_mesh_; }

 private:
  double eval(const Params& theta, Params* grad) const;
  double eval_classical(const Params&, Params*, std::size_t mu_index) const;
  double eval_mse(const Params&, Params*, std::size_t mu_index) const;
  double eval_wavelet(const Params&, Params*, std::size_t mu_index) const;

  ProblemSpec problem_;
  Architecture arch_;
  LossConfig cfg_;
  QuadMesh plain_mesh_;
  std::vector<double> x_points_;
  std::vector<Eigen::MatrixXd> Z_;  ///< per-mu input batch (wavelet: mesh nodes; else: S_x + traces)
  std::vector<std::shared_ptr<const ResidualAssembler>> assemblers_;
};

// Convenience wrappers matching the per-kind operations.
double loss_classical(const ProblemSpec&, const Architecture&, const Params&, const LossConfig&);
double loss_mse(const ProblemSpec&, const Architecture&, const Params&, const LossConfig&);
double loss_wavelet(const ProblemSpec&, const Architecture&, const Params&, const LossConfig&);

}  // namespace wpinn
