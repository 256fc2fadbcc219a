// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file problems.hpp
/// @brief The two experiment instances: the nonparametric periodic Poisson
///        problem and the parameterized diffusion-reaction family with a
///        continuous piecewise-affine diffusion coefficient.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wpinn {

enum class OperatorKind { Poisson, DiffusionReaction };
enum class Formulation { Classical, Weak, UltraWeak };

/// Sobolev index of the residual's dual norm: 1 for the weak form, 2 for
/// the ultra-weak form. Classical has none.
int formulation_sigma(Formulation f);

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

/// Continuous piecewise-affine diffusion coefficient with breakpoints
/// xi_i = i/(p+1) and boundary values mu_0 = mu_{p+1} = 1.
struct DiffusionCoefficient {
  int param_count = 2;

  double breakpoint(int i) const { return static_cast<double>(i) / (param_count + 1); }
  double node_value(int i, const std::vector<double>& mu) const;

  /// A(x; mu); clamps x into [0,1) periodically.
  double value(double x, const std::vector<double>& mu) const;
  /// Piecewise-constant slope A'(x; mu), right-continuous at breakpoints.
  double slope(double x, const std::vector<double>& mu) const;
};

/// A parameterized PDE instance: operator action data, right-hand side,
/// parameter box, and stability information. Periodic trace conditions
/// throughout.
struct ProblemSpec {
  std::string id;
  OperatorKind op = OperatorKind::Poisson;
  int param_dim = 0;
  std::vector<std::pair<double, double>> param_box;
  std::function<double(double)> rhs;
  std::function<double(double)> exact;        ///< empty when only a FEM truth exists
  std::function<double(double)> exact_deriv;  ///< set alongside exact
  std::function<double(const std::vector<double>&)> stability;  ///< alpha(mu)
  DiffusionCoefficient coeff;  ///< used when op == DiffusionReaction
  bool zero_mean_gauge = false;  ///< solution fixed in L_{2,0}

  double A(double x, const std::vector<double>& mu) const;
  double A_slope(double x, const std::vector<double>& mu) const;
  /// alpha(mu); warns on stderr when mu leaves the box but still evaluates.
  double alpha(const std::vector<double>& mu) const;
  /// Continuity constant C(mu) = max{||A(mu)||_inf, 1}.
  double continuity(const std::vector<double>& mu) const;
  /// Interior kinks of A (empty for Poisson).
  std::vector<double> kinks() const;
  bool in_box(const std::vector<double>& mu) const;
};

/// f and, when available, the exact solution of the catalog problem at x.
std::pair<double, std::optional<double>> manufactured(const std::string& problem_id, double x);

/// Catalog lookup by string id: "problem1" (periodic Poisson) or
/// "problem2" (parameterized diffusion-reaction). Unknown ids throw.
ProblemSpec make_problem(const std::string& id);

}  // namespace wpinn
