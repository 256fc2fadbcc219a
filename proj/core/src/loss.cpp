// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace wpinn {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::Classical:
      return "classical";
    case LossKind::Mse:
      return "mse";
    case LossKind::WaveletWeak:
      return "wavelet_weak";
    case LossKind::WaveletUltraWeak:
      return "wavelet_ultraweak";
  }
  return "?";
}

int LossConfig::sigma() const {
  switch (kind) {
    case LossKind::WaveletWeak:
      return 1;
    case LossKind::WaveletUltraWeak:
      return 2;
    default:
      throw std::logic_error("LossConfig::sigma: only wavelet losses carry a regularity index");
  }
}

namespace {

bool is_wavelet(LossKind k) { return k == LossKind::WaveletWeak || k == LossKind::WaveletUltraWeak; }

Eigen::MatrixXd input_batch(const std::vector<double>& xs, const std::vector<double>& mu) {
  Eigen::MatrixXd Z(1 + mu.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Z(0, i) = xs[i];
    for (std::size_t m = 0; m < mu.size(); ++m) Z(1 + static_cast<Eigen::Index>(m), i) = mu[m];
  }
  return Z;
}

}  // namespace

LossFunction::LossFunction(ProblemSpec problem, Architecture arch, LossConfig cfg)
    : problem_(std::move(problem)), arch_(std::move(arch)), cfg_(std::move(cfg)) {
  arch_.validate();
  if (arch_.input_dim() != 1 + problem_.param_dim)
    throw std::invalid_argument("LossFunction: architecture input dimension must be 1 + p");
  if (cfg_.mu_samples.empty()) throw std::invalid_argument("LossFunction: S_mu must not be empty");
  for (const auto& mu : cfg_.mu_samples)
    if (static_cast<int>(mu.size()) != problem_.param_dim)
      throw std::invalid_argument("LossFunction: parameter sample dimension mismatch");
  if (cfg_.level < 0 || cfg_.level > 24) throw std::invalid_argument("LossFunction: bad level");

  if (cfg_.kind == LossKind::Mse && !problem_.exact)
    throw std::invalid_argument("LossFunction: mse loss needs a problem with a known solution");

  plain_mesh_ = QuadMesh::dyadic(cfg_.level, cfg_.quad_points);
  x_points_ = cfg_.x_samples.empty() ? plain_mesh_.nodes : cfg_.x_samples;

  if (is_wavelet(cfg_.kind)) {
    const double sig = cfg_.sigma();
    if (!(sig < cfg_.basis.gamma))
      throw std::invalid_argument("LossFunction: sigma/basis mismatch: need gamma > " +
                                  std::to_string(sig) + " but " + cfg_.basis.name() + " has gamma " +
                                  std::to_string(cfg_.basis.gamma));
    const Formulation form =
        cfg_.kind == LossKind::WaveletWeak ? Formulation::Weak : Formulation::UltraWeak;
    for (const auto& mu : cfg_.mu_samples) {
      assemblers_.push_back(std::make_shared<const ResidualAssembler>(problem_, form, cfg_.basis,
                                                                      cfg_.level, mu, cfg_.quad_points));
      std::vector<double> xs = assemblers_.back()->mesh().nodes;
      if (cfg_.kind == LossKind::WaveletWeak) {
        // The periodic weak residual cannot see a linear drift (its pairing
        // with periodic test derivatives vanishes), so the weak variant
        // carries the trace penalty; the ultra-weak residual encodes the
        // boundary conditions already.
        xs.push_back(0.0);
        xs.push_back(1.0);
      }
      Z_.push_back(input_batch(xs, mu));
    }
  } else {
    for (const auto& mu : cfg_.mu_samples) {
      std::vector<double> xs = x_points_;
      if (cfg_.kind == LossKind::Classical) {
        xs.push_back(0.0);  // periodic trace columns ride in the same batch
        xs.push_back(1.0);
      }
      Z_.push_back(input_batch(xs, mu));
    }
  }
}

double LossFunction::value(const Params& theta) const { return eval(theta, nullptr); }

double LossFunction::value_and_grad(const Params& theta, Params& grad) const {
  grad = Params::zeros(arch_);
  return eval(theta, &grad);
}

double LossFunction::eval(const Params& theta, Params* grad) const {
  double total = 0.0;
  for (std::size_t s = 0; s < cfg_.mu_samples.size(); ++s) {
    switch (cfg_.kind) {
      case LossKind::Classical:
        total += eval_classical(theta, grad, s);
        break;
      case LossKind::Mse:
        total += eval_mse(theta, grad, s);
        break;
      default:
        total += eval_wavelet(theta, grad, s);
        break;
    }
  }
  return total;
}

double LossFunction::eval_classical(const Params& theta, Params* grad, std::size_t s) const {
  const Eigen::MatrixXd& Z = Z_[s];
  const std::vector<double>& mu = cfg_.mu_samples[s];
  const Eigen::Index n = Z.cols() - 2;  // trailing trace columns
  const JetBatch jets = forward_jet_batch(arch_, theta, Z, 2);

  JetBatch seed;
  if (grad) {
    seed.u = Eigen::VectorXd::Zero(Z.cols());
    seed.ux = Eigen::VectorXd::Zero(Z.cols());
    seed.uxx = Eigen::VectorXd::Zero(Z.cols());
  }

  double L = 0.0;
  const bool dr = problem_.op == OperatorKind::DiffusionReaction;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = Z(0, i);
    const double a = dr ? problem_.A(x, mu) : 1.0;
    const double ap = dr ? problem_.A_slope(x, mu) : 0.0;
    double r = problem_.rhs(x) + a * jets.uxx[i];
    if (dr) r += ap * jets.ux[i] - jets.u[i];
    L += r * r;
    if (grad) {
      seed.uxx[i] = 2.0 * r * a;
      if (dr) {
        seed.ux[i] = 2.0 * r * ap;
        seed.u[i] = -2.0 * r;
      }
    }
  }

  const double t_val = jets.u[n] - jets.u[n + 1];
  const double t_der = jets.ux[n] - jets.ux[n + 1];
  L += cfg_.omega_b * (t_val * t_val + t_der * t_der);
  if (grad) {
    seed.u[n] += 2.0 * cfg_.omega_b * t_val;
    seed.u[n + 1] -= 2.0 * cfg_.omega_b * t_val;
    seed.ux[n] += 2.0 * cfg_.omega_b * t_der;
    seed.ux[n + 1] -= 2.0 * cfg_.omega_b * t_der;
    accumulate_jet_gradient(arch_, theta, Z, 2, seed, *grad);
  }
  return L;
}

double LossFunction::eval_mse(const Params& theta, Params* grad, std::size_t s) const {
  const Eigen::MatrixXd& Z = Z_[s];
  const Eigen::Index n = Z.cols();
  const JetBatch out = forward_jet_batch(arch_, theta, Z, 0);
  double L = 0.0;
  JetBatch seed;
  if (grad) seed.u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = out.u[i] - problem_.exact(Z(0, i));
    L += e * e;
    if (grad) seed.u[i] = 2.0 * e / static_cast<double>(n);
  }
  L /= static_cast<double>(n);
  if (grad) accumulate_jet_gradient(arch_, theta, Z, 0, seed, *grad);
  return L;
}

double LossFunction::eval_wavelet(const Params& theta, Params* grad, std::size_t s) const {
  const ResidualAssembler& as = *assemblers_[s];
  const Eigen::MatrixXd& Z = Z_[s];
  const bool weak = cfg_.kind == LossKind::WaveletWeak;
  const int order = weak ? 1 : 0;
  const double sig = cfg_.sigma();
  const Eigen::Index n = as.mesh().node_count();

  const JetBatch out = forward_jet_batch(arch_, theta, Z, order);
  const Eigen::VectorXd u = out.u.head(n);
  Eigen::VectorXd ux;
  if (weak) ux = out.ux.head(n);
  const Eigen::VectorXd c = as.assemble(u, weak ? &ux : nullptr);
  const CoefficientPyramid pyr = fwt_decompose(c, cfg_.basis, 0);
  double L = weighted_sobolev_sum(pyr, sig);

  double t_val = 0.0, t_der = 0.0;
  if (weak) {
    t_val = out.u[n] - out.u[n + 1];
    t_der = out.ux[n] - out.ux[n + 1];
    L += cfg_.omega_b * (t_val * t_val + t_der * t_der);
  }

  if (grad) {
    CoefficientPyramid adj = pyr;
    adj.coarse = 2.0 * pyr.coarse;
    for (std::size_t i = 0; i < pyr.details.size(); ++i) {
      const int j = pyr.coarsest + static_cast<int>(i);
      adj.details[i] = (2.0 * std::exp2(-2.0 * sig * j)) * pyr.details[i];
    }
    const Eigen::VectorXd cbar = fwt_decompose_transpose(adj, cfg_.basis);

    JetBatch seed;
    seed.u = Eigen::VectorXd::Zero(Z.cols());
    Eigen::VectorXd ubar, uxbar;
    as.adjoint(cbar, ubar, weak ? &uxbar : nullptr);
    seed.u.head(n) = ubar;
    if (weak) {
      seed.ux = Eigen::VectorXd::Zero(Z.cols());
      seed.ux.head(n) = uxbar;
      seed.u[n] += 2.0 * cfg_.omega_b * t_val;
      seed.u[n + 1] -= 2.0 * cfg_.omega_b * t_val;
      seed.ux[n] += 2.0 * cfg_.omega_b * t_der;
      seed.ux[n + 1] -= 2.0 * cfg_.omega_b * t_der;
    }
    accumulate_jet_gradient(arch_, theta, Z, order, seed, *grad);
  }
  return L;
}

double loss_classical(const ProblemSpec& p, const Architecture& a, const Params& t,
                      const LossConfig& cfg) {
  LossConfig c = cfg;
  c.kind = LossKind::Classical;
  return LossFunction(p, a, c).value(t);
}

double loss_mse(const ProblemSpec& p, const Architecture& a, const Params& t, const LossConfig& cfg) {
  LossConfig c = cfg;
  c.kind = LossKind::Mse;
  return LossFunction(p, a, c).value(t);
}

double loss_wavelet(const ProblemSpec& p, const Architecture& a, const Params& t,
                    const LossConfig& cfg) {
  if (!is_wavelet(cfg.kind))
    throw std::invalid_argument("loss_wavelet: config kind must be a wavelet loss");
  return LossFunction(p, a, cfg).value(t);
}

}  // namespace wpinn
