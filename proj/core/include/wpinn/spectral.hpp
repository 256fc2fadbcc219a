// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file spectral.hpp
/// @brief Fourier-based oracle for periodic fractional Sobolev norms, a
///        fine-grid periodic FEM reference solver, and cascade evaluation of
///        scaling functions and wavelets on dyadic grids. Used for norm
///        constants, truth solutions and test oracles only - never inside
///        the training loop.

#include "wpinn/problems.hpp"
#include "wpinn/splinequad.hpp"
#include "wpinn/wavelet.hpp"

#include <Eigen/Core>

#include <complex>
#include <filesystem>
#include <vector>

namespace wpinn {

/// A 1-periodic function represented by samples at x_i = i/n, n a power of two.
struct GridFunction {
  Eigen::VectorXd values;

  int size() const { return static_cast<int>(values.size()); }
  /// Periodic piecewise-linear interpolation.
  double value_at(double x) const;
};

/// Discrete Fourier coefficients g_k ~= int g e^{-2 pi i k x}, k = 0..n/2.
Eigen::VectorXcd fourier_coefficients(const GridFunction& g);

/// ( sum_{|k| < n/2} (1 + (2 pi k)^2)^sigma |g_k|^2 )^{1/2}.
double sobolev_norm(const GridFunction& g, double sigma);

/// H^sigma inner product of two grid functions of the same resolution.
double sobolev_inner(const GridFunction& g, const GridFunction& h, double sigma);

/// Periodic linear finite elements on a uniform n-cell mesh for the catalog
/// problems; returns nodal values. The pure Poisson case is gauged to zero
/// mean via a Lagrange multiplier.
GridFunction fem_reference(const ProblemSpec& problem, const std::vector<double>& mu, int cells);

/// Values of a compactly supported function on the dyadic grid of its own
/// support: x0 + i*step, step = 2^{-depth}.
struct SampledFunction {
  double x0 = 0;
  double step = 1;
  Eigen::VectorXd values;

  int size() const { return static_cast<int>(values.size()); }
  /// Linear interpolation; zero outside the support.
  double at(double x) const;
};

/// Evaluates the scaling function or mother wavelet (either side) at dyadic
/// resolution 2^{-depth} by iterating the two-scale relation: the integer
/// lattice values are the fixed point of the refinement operator (power
/// iteration from an indicator seed), and each subsequent halving of the
/// step applies the relation exactly. Throws on non-convergence of the
/// lattice iteration; this genuinely happens for duals of low regularity
/// (cdf(2,2), cdf(4,4)), which have no stable point values - use the
/// Fourier-side facilities below for those.
SampledFunction cascade_values(const WaveletBasis& basis, FnSide side, FnKind kind, int depth);

/// Fourier transform of the refinable function with the given mask at xi:
/// the infinite product prod_{j>=1} (1/2) sum_k m_k e^{-i k xi / 2^j},
/// truncated once the argument is negligible. Exact up to ~1e-12 for any
/// L2 scaling function, pointwise-evaluable or not.
std::complex<double> scaling_fourier(const Mask& mask, double xi);

/// sum_k c_k phit_{J,k} as a band-limited grid function of 2^{J+oversample}
/// points: Fourier coefficients are exact (periodization samples the
/// continuous transform), values come from the inverse FFT.
GridFunction synthesize_single_scale_dual(const WaveletBasis& basis, const Eigen::VectorXd& c,
                                          int oversample = 4);

/// sum_{j,k} d_{j,k} psit_{j,k} (coarse block included) on the grid of
/// 2^{J+oversample} points: inverse FWT down to single scale, then dual
/// scaling synthesis.
GridFunction synthesize_dual_expansion(const WaveletBasis& basis, const CoefficientPyramid& p,
                                       int oversample = 4);

/// Two-column CSV export (x, value) for plotting.
void write_grid_csv(const std::filesystem::path& path, const GridFunction& g);

}  // namespace wpinn
