// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file certify.hpp
/// @brief Computable a posteriori error bounds assembled from the wavelet
///        residual norm, the formulation's stability constant and the
///        norm-equivalence constants; effectivity reporting and certificate
///        export.

#include "wpinn/formulations.hpp"
#include "wpinn/network.hpp"
#include "wpinn/problems.hpp"
#include "wpinn/wavelet.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wpinn {

/// Error-bound assembly for one (problem, formulation, basis, level). The
/// certifier never sees a truth solution; eta is built from computable
/// quantities only:
///   eta(mu) = (1/alpha(mu)) * sqrt(C_up * weighted_sum(sigma)).
class Certifier {
 public:
  /// Throws when the constants are missing or inconsistent with the
  /// formulation (wrong sigma, level too small, non-positive).
  Certifier(ProblemSpec problem, Architecture arch, Formulation form, WaveletBasis basis,
            int level, NormEquivalence constants, int quad_points = 3);

  double error_bound(const Params& theta, const std::vector<double>& mu) const;

  /// The residual pyramid behind the bound (exposed for diagnostics).
  CoefficientPyramid residual_pyramid(const Params& theta, const std::vector<double>& mu) const;

  Formulation formulation() const { return form_; }
  int level() const { return level_; }
  const NormEquivalence& constants() const { return constants_; }

 private:
  ProblemSpec problem_;
  Architecture arch_;
  Formulation form_;
  WaveletBasis basis_;
  int level_;
  NormEquivalence constants_;
  int quad_points_;
};

/// eta / true_error; +infinity when the true error vanishes.
double effectivity(double eta, double true_error);

struct CertificateRow {
  std::vector<double> mu;
  double eta = 0;
  double error = std::numeric_limits<double>::quiet_NaN();  ///< NaN when no truth was available
  double effectivity = std::numeric_limits<double>::quiet_NaN();
  int level = 0;
  double alpha = 0;
  double C_up = 0;
};

/// CSV columns: mu1..mup, eta, error_if_truth, effectivity, J, alpha, C_up.
/// `header_lines` are emitted first as "# ..." comments.
void write_certificate_csv(const std::filesystem::path& path, int param_dim,
                           const std::vector<CertificateRow>& rows,
                           const std::vector<std::string>& header_lines);

/// A trained network together with its per-parameter certificates. Built
/// from computable quantities only; error/effectivity columns stay NaN until
/// a caller with truth access fills them.
struct CertifiedSolution {
  Params theta;
  std::vector<CertificateRow> records;
};

CertifiedSolution certify_over(const Certifier& certifier, const ProblemSpec& problem,
                               const Params& theta,
                               const std::vector<std::vector<double>>& mu_list);

}  // namespace wpinn
