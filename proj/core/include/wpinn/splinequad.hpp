// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file splinequad.hpp
/// @brief Cardinal B-spline evaluation, periodized scaling functions and
///        wavelets with derivatives, and composite Gauss-Legendre quadrature
///        against arbitrary callables on (0,1).

#include "wpinn/wavelet.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wpinn {

/// r-th derivative of the order-d cardinal B-spline with support [0, d],
/// Cox-de Boor recursion. Classical derivatives exist for r <= d-2; r = d-1
/// returns the right-limit value at knots. r >= d throws.
double bspline_eval(int d, int r, double x);

enum class FnKind { Scaling, Wavelet };
enum class FnSide { Primal, Dual };

/// A periodized, scaled and shifted scaling function or wavelet on (0,1):
/// g_{j,k} = sum_m g_[j,k](. - m) restricted to [0,1).
struct PeriodizedFunction {
  WaveletBasis basis;
  int level = 0;
  int shift = 0;
  FnKind kind = FnKind::Scaling;
  FnSide side = FnSide::Primal;

  /// Support [lo, hi] of the unperiodized base function g (own coordinates).
  std::pair<double, double> base_support() const;

  /// Dyadic cell level whose cells contain only polynomial pieces of the
  /// function (level + 1 for wavelets, whose knots sit on half-cells).
  int piecewise_level() const { return level + (kind == FnKind::Wavelet ? 1 : 0); }
};

/// Pointwise evaluation of the r-th derivative at x in [0,1). Primal side
/// only; dual functions have no closed form and must go through the cascade
/// facility in spectral.hpp.
double periodized_eval(const PeriodizedFunction& f, double x, int deriv = 0);

/// Gauss-Legendre nodes and weights on [-1, 1], computed to machine
/// precision by Newton iteration.
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite Gauss-Legendre rule over [0,1): 2^level dyadic cells, each
/// optionally split at interior breakpoints (for integrands with kinks) and
/// carrying q nodes per panel.
struct QuadMesh {
  int level = 0;
  int points_per_panel = 3;
  std::vector<double> nodes;    ///< global node coordinates, panel-major
  std::vector<double> weights;  ///< matching weights; sums to 1
  std::vector<int> panel_cell;  ///< parent dyadic cell of each panel
  std::vector<std::pair<double, double>> panels;

  int panel_count() const { return static_cast<int>(panels.size()); }
  int node_count() const { return static_cast<int>(nodes.size()); }

  static QuadMesh dyadic(int level, int q = 3, std::span<const double> splits = {});
};

/// (g, f^(r))_{L2(0,1)} by composite Gauss quadrature on the dyadic cells of
/// f's piecewise level intersected with supp f; exact for integrands that
/// are polynomial of degree <= 2q-1 on each cell.
double inner_product(const std::function<double(double)>& g, const PeriodizedFunction& f,
                     int deriv = 0, int q = 3);

/// All single-scale coefficients c_{J,k} = (g, phi_{J,k}) at once, sharing
/// the quadrature evaluations of g across overlapping supports.
Eigen::VectorXd single_scale_coeffs(const std::function<double(double)>& g, int level,
                                    const WaveletBasis& basis, int q = 3);

}  // namespace wpinn
