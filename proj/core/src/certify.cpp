// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/certify.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wpinn {

Certifier::Certifier(ProblemSpec problem, Architecture arch, Formulation form, WaveletBasis basis,
                     int level, NormEquivalence constants, int quad_points)
    : problem_(std::move(problem)),
      arch_(std::move(arch)),
      form_(form),
      basis_(std::move(basis)),
      level_(level),
      constants_(constants),
      quad_points_(quad_points) {
  if (form_ != Formulation::Weak && form_ != Formulation::UltraWeak)
    throw std::invalid_argument("Certifier: weak or ultra-weak only");
  const int sigma = formulation_sigma(form_);
  if (!(constants_.c_low > 0.0) || !(constants_.C_up >= constants_.c_low) ||
      !std::isfinite(constants_.C_up))
    throw std::invalid_argument("Certifier: missing or invalid norm-equivalence constants");
  if (constants_.sigma != -sigma)
    throw std::invalid_argument("Certifier: constants were estimated for sigma " +
                                std::to_string(constants_.sigma) + ", formulation needs " +
                                std::to_string(-sigma));
  if (constants_.level < level_)
    throw std::invalid_argument("Certifier: constants certified only up to level " +
                                std::to_string(constants_.level));
}

CoefficientPyramid Certifier::residual_pyramid(const Params& theta,
                                               const std::vector<double>& mu) const {
  const ResidualAssembler as(problem_, form_, basis_, level_, mu, quad_points_);
  const int n = as.mesh().node_count();
  Eigen::MatrixXd Z(1 + mu.size(), n);
  for (int i = 0; i < n; ++i) {
    Z(0, i) = as.mesh().nodes[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < mu.size(); ++m) Z(1 + static_cast<Eigen::Index>(m), i) = mu[m];
  }
  const int order = as.needs_first_derivative() ? 1 : 0;
  const JetBatch jets = forward_jet_batch(arch_, theta, Z, order);
  const Eigen::VectorXd c = as.assemble(jets.u, order ? &jets.ux : nullptr);
  return fwt_decompose(c, basis_, 0);
}

double Certifier::error_bound(const Params& theta, const std::vector<double>& mu) const {
  const CoefficientPyramid pyr = residual_pyramid(theta, mu);
  const double S = weighted_sobolev_sum(pyr, formulation_sigma(form_));
  const double alpha = problem_.alpha(mu);
  return std::sqrt(constants_.C_up * S) / alpha;
}

double effectivity(double eta, double true_error) {
  if (true_error == 0.0) return std::numeric_limits<double>::infinity();
  return eta / true_error;
}

CertifiedSolution certify_over(const Certifier& certifier, const ProblemSpec& problem,
                               const Params& theta,
                               const std::vector<std::vector<double>>& mu_list) {
  CertifiedSolution out;
  out.theta = theta;
  for (const auto& mu : mu_list) {
    CertificateRow row;
    row.mu = mu;
    row.eta = certifier.error_bound(theta, mu);
    row.level = certifier.level();
    row.alpha = problem.alpha(mu);
    row.C_up = certifier.constants().C_up;
    out.records.push_back(std::move(row));
  }
  return out;
}

void write_certificate_csv(const std::filesystem::path& path, int param_dim,
                           const std::vector<CertificateRow>& rows,
                           const std::vector<std::string>& header_lines) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_certificate_csv: cannot open " + path.string());
  for (const auto& line : header_lines) os << "# " << line << "\n";
  for (int i = 1; i <= param_dim; ++i) os << "mu" << i << ",";
  os << "eta,error_if_truth,effectivity,J,alpha,C_up\n";
  os.precision(12);
  for (const auto& r : rows) {
    for (int i = 0; i < param_dim; ++i) os << r.mu[static_cast<std::size_t>(i)] << ",";
    os << r.eta << "," << r.error << "," << r.effectivity << "," << r.level << "," << r.alpha << ","
       << r.C_up << "\n";
  }
}

}  // namespace wpinn
