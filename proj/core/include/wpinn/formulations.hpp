// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file formulations.hpp
/// @brief Residual assembly for the classical pointwise, standard weak and
///        ultra-weak (integration by parts) formulations of the catalog
///        operator family.

#include "wpinn/network.hpp"
#include "wpinn/problems.hpp"
#include "wpinn/splinequad.hpp"
#include "wpinn/wavelet.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace wpinn {

/// Pointwise interior residual f(x) - (B u)(x) via order-2 jets. At a kink
/// of A the right-limit slope is used.
double classical_residual(const ProblemSpec& problem, const Architecture& arch,
                          const Params& theta, double x, const std::vector<double>& mu);

/// Periodic-trace residual (u(0)-u(1), u'(0)-u'(1)).
std::array<double, 2> boundary_residual(const ProblemSpec& problem, const Architecture& arch,
                                        const Params& theta, const std::vector<double>& mu);

/// (B* test)(x) = -A test'' - A' test' + test (Poisson: -test''). The test
/// function must be primal of spline order >= 3.
double apply_adjoint(const ProblemSpec& problem, const std::vector<double>& mu,
                     const PeriodizedFunction& test, double x);

/// (f, test) - (A u', test') - (u, test) for diffusion-reaction, respectively
/// (f, test) - (u', test') for Poisson, by composite Gauss quadrature split
/// at the kinks of A.
double weak_tested_residual(const ProblemSpec& problem, const Architecture& arch,
                            const Params& theta, const std::vector<double>& mu,
                            const PeriodizedFunction& test, int q = 3);

/// Ultra-weak single-scale coefficient
///   c_{J,k} = (f, phi_{J,k}) - (u, B* phi_{J,k});
/// the network enters through plain forward evaluations only.
double ultraweak_coeff(const ProblemSpec& problem, const Architecture& arch, const Params& theta,
                       const std::vector<double>& mu, const WaveletBasis& basis, int level, int k,
                       int q = 3);

/// Precomputed linear map from network samples on a quadrature mesh to the
/// full single-scale residual coefficient vector:
///   c = f_vec - B0 u - B1 ux          (weak)
///   c = f_vec - B0 (u - m(u))         (ultra-weak, when the gauge is on)
/// with m(u) the quadrature mean. Built once per (problem, mu, level) and
/// reused across loss/gradient evaluations; the adjoint mirrors exactly what
/// assemble computes.
class ResidualAssembler {
 public:
  ResidualAssembler(const ProblemSpec& problem, Formulation form, const WaveletBasis& basis,
                    int level, const std::vector<double>& mu, int q = 3);

  const QuadMesh& mesh() const { return mesh_; }
  int coeff_count() const { return 1 << level_; }
  int level() const { return level_; }
  bool needs_first_derivative() const { return form_ == Formulation::Weak; }
  bool zero_mean() const { return zero_mean_; }
  const Eigen::VectorXd& rhs_coeffs() const { return f_coeffs_; }

  Eigen::VectorXd assemble(const Eigen::VectorXd& u, const Eigen::VectorXd* ux) const;
  void adjoint(const Eigen::VectorXd& cbar, Eigen::VectorXd& ubar, Eigen::VectorXd* uxbar) const;

 private:
  Formulation form_;
  int level_;
  bool zero_mean_ = false;
  QuadMesh mesh_;
  Eigen::VectorXd f_coeffs_;
  Eigen::SparseMatrix<double> B0_, B1_;
  Eigen::VectorXd mean_weights_;
  Eigen::VectorXd B0_ones_;
};

}  // namespace wpinn
