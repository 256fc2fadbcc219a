// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/formulations.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wpinn {

double classical_residual(const ProblemSpec& problem, const Architecture& arch,
                          const Params& theta, double x, const std::vector<double>& mu) {
  const Jet2 jet = forward_jet(arch, theta, x, mu, 2);
  const double f = problem.rhs(x);
  if (problem.op == OperatorKind::Poisson) return f + jet.uxx;
  // B u = -(A u')' + u = -(A' u' + A u'') + u
  return f + problem.A(x, mu) * jet.uxx + problem.A_slope(x, mu) * jet.ux - jet.u;
}

std::array<double, 2> boundary_residual(const ProblemSpec& problem, const Architecture& arch,
                                        const Params& theta, const std::vector<double>& mu) {
  (void)problem;  // periodic traces for the whole catalog
  const Jet2 j0 = forward_jet(arch, theta, 0.0, mu, 1);
  const Jet2 j1 = forward_jet(arch, theta, 1.0, mu, 1);
  return {j0.u - j1.u, j0.ux - j1.ux};
}

double apply_adjoint(const ProblemSpec& problem, const std::vector<double>& mu,
                     const PeriodizedFunction& test, double x) {
  if (test.side != FnSide::Primal || test.basis.d < 3)
    throw std::invalid_argument(
        "apply_adjoint: test function must be primal of spline order >= 3");
  const double t2 = periodized_eval(test, x, 2);
  if (problem.op == OperatorKind::Poisson) return -t2;
  const double t0 = periodized_eval(test, x, 0);
  const double t1 = periodized_eval(test, x, 1);
  return -problem.A(x, mu) * t2 - problem.A_slope(x, mu) * t1 + t0;
}

namespace {

// Composite Gauss panels over the cells of `level` intersected with the
// wrapped support of `test`, split at the problem's kinks.
struct SupportQuad {
  std::vector<double> nodes;
  std::vector<double> weights;
};

SupportQuad support_quadrature(const ProblemSpec& problem, const PeriodizedFunction& test, int q) {
  SupportQuad out;
  const int jq = test.piecewise_level();
  const double cell_w = std::exp2(-jq);
  const int n_cells = 1 << jq;
  const auto [lo, hi] = test.base_support();
  const double start = (lo + test.shift) * std::exp2(-test.level);
  const double end = (hi + test.shift) * std::exp2(-test.level);
  int c_first = static_cast<int>(std::floor(start / cell_w));
  int c_last = static_cast<int>(std::ceil(end / cell_w)) - 1;
  if (c_last - c_first + 1 >= n_cells) {
    c_first = 0;
    c_last = n_cells - 1;
  }
  const std::vector<double> kinks = problem.kinks();
  std::vector<double> gn, gw;
  gauss_legendre(q, gn, gw);
  std::vector<double> cuts;
  for (int c = c_first; c <= c_last; ++c) {
    const double a = c * cell_w, b = a + cell_w;
    cuts.assign(1, a);
    for (double s : kinks)
      for (int img = -1; img <= 1; ++img) {
        const double si = s + img;  // kinks live in [0,1); cells may sit outside before wrap
        if (si > a + 1e-14 && si < b - 1e-14) cuts.push_back(si);
      }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double half = 0.5 * (cuts[p + 1] - cuts[p]), mid = 0.5 * (cuts[p] + cuts[p + 1]);
      for (int i = 0; i < q; ++i) {
        out.nodes.push_back(mid + half * gn[static_cast<std::size_t>(i)]);
        out.weights.push_back(half * gw[static_cast<std::size_t>(i)]);
      }
    }
  }
  return out;
}

}  // namespace

double weak_tested_residual(const ProblemSpec& problem, const Architecture& arch,
                            const Params& theta, const std::vector<double>& mu,
                            const PeriodizedFunction& test, int q) {
  if (test.side != FnSide::Primal)
    throw std::invalid_argument("weak_tested_residual: test function must be primal");
  const SupportQuad quad = support_quadrature(problem, test, q);
  double s = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double x = quad.nodes[i] - std::floor(quad.nodes[i]);
    const double w = quad.weights[i];
    const Jet2 jet = forward_jet(arch, theta, x, mu, 1);
    const double t0 = periodized_eval(test, x, 0);
    const double t1 = periodized_eval(test, x, 1);
    double v = problem.rhs(x) * t0 - problem.A(x, mu) * jet.ux * t1;
    if (problem.op == OperatorKind::DiffusionReaction) v -= jet.u * t0;
    s += w * v;
  }
  return s;
}

double ultraweak_coeff(const ProblemSpec& problem, const Architecture& arch, const Params& theta,
                       const std::vector<double>& mu, const WaveletBasis& basis, int level, int k,
                       int q) {
  PeriodizedFunction test{basis, level, k, FnKind::Scaling, FnSide::Primal};
  const SupportQuad quad = support_quadrature(problem, test, q);
  std::vector<double> z(1 + mu.size());
  for (std::size_t m = 0; m < mu.size(); ++m) z[m + 1] = mu[m];
  double s = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double x = quad.nodes[i] - std::floor(quad.nodes[i]);
    const double w = quad.weights[i];
    z[0] = x;
    const double u = forward(arch, theta, z);
    s += w * (problem.rhs(x) * periodized_eval(test, x, 0) - u * apply_adjoint(problem, mu, test, x));
  }
  return s;
}

ResidualAssembler::ResidualAssembler(const ProblemSpec& problem, Formulation form,
                                     const WaveletBasis& basis, int level,
                                     const std::vector<double>& mu, int q)
    : form_(form), level_(level) {
  if (form != Formulation::Weak && form != Formulation::UltraWeak)
    throw std::invalid_argument("ResidualAssembler: weak or ultra-weak only");
  if (form == Formulation::UltraWeak && basis.d < 3)
    throw std::invalid_argument("ResidualAssembler: ultra-weak tests need spline order >= 3");
  if (level < 0) throw std::invalid_argument("ResidualAssembler: level must be >= 0");
  zero_mean_ = (form == Formulation::UltraWeak) && problem.zero_mean_gauge;

  const std::vector<double> kinks = problem.kinks();
  mesh_ = QuadMesh::dyadic(level, q, kinks);
  const int n_nodes = mesh_.node_count();
  const int n_coeff = 1 << level;
  const int d = basis.d;

  // panel lookup by parent cell
  std::vector<std::vector<int>> cell_panels(static_cast<std::size_t>(n_coeff));
  for (int p = 0; p < mesh_.panel_count(); ++p)
    cell_panels[static_cast<std::size_t>(mesh_.panel_cell[static_cast<std::size_t>(p)])].push_back(p);

  f_coeffs_.setZero(n_coeff);
  std::vector<Eigen::Triplet<double>> t0, t1;
  t0.reserve(static_cast<std::size_t>(n_coeff) * static_cast<std::size_t>(d) * 2 *
             static_cast<std::size_t>(q));
  if (form == Formulation::Weak) t1.reserve(t0.capacity());

  for (int k = 0; k < n_coeff; ++k) {
    PeriodizedFunction phi{basis, level, k, FnKind::Scaling, FnSide::Primal};
    const int span = std::min(d, n_coeff);
    for (int o = 0; o < span; ++o) {
      const int cell = (k + o) % n_coeff;
      for (int p : cell_panels[static_cast<std::size_t>(cell)]) {
        for (int i = 0; i < q; ++i) {
          const int node = p * q + i;
          const double x = mesh_.nodes[static_cast<std::size_t>(node)];
          const double w = mesh_.weights[static_cast<std::size_t>(node)];
          const double v0 = periodized_eval(phi, x, 0);
          f_coeffs_[k] += w * problem.rhs(x) * v0;
          if (form == Formulation::Weak) {
            if (problem.op == OperatorKind::DiffusionReaction) t0.emplace_back(k, node, w * v0);
            t1.emplace_back(k, node, w * problem.A(x, mu) * periodized_eval(phi, x, 1));
          } else {
            t0.emplace_back(k, node, w * apply_adjoint(problem, mu, phi, x));
          }
        }
      }
    }
  }

  B0_.resize(n_coeff, n_nodes);
  B0_.setFromTriplets(t0.begin(), t0.end());
  if (form == Formulation::Weak) {
    B1_.resize(n_coeff, n_nodes);
    B1_.setFromTriplets(t1.begin(), t1.end());
  }
  if (zero_mean_) {
    mean_weights_ = Eigen::Map<const Eigen::VectorXd>(mesh_.weights.data(), n_nodes);
    B0_ones_ = B0_ * Eigen::VectorXd::Ones(n_nodes);
  }
}

Eigen::VectorXd ResidualAssembler::assemble(const Eigen::VectorXd& u, const Eigen::VectorXd* ux) const {
  if (u.size() != mesh_.node_count())
    throw std::invalid_argument("ResidualAssembler::assemble: sample count mismatch");
  Eigen::VectorXd c = f_coeffs_ - B0_ * u;
  if (zero_mean_) c += mean_weights_.dot(u) * B0_ones_;
  if (form_ == Formulation::Weak) {
    if (ux == nullptr || ux->size() != u.size())
      throw std::invalid_argument("ResidualAssembler::assemble: weak form needs first derivatives");
    c -= B1_ * (*ux);
  }
  return c;
}

void ResidualAssembler::adjoint(const Eigen::VectorXd& cbar, Eigen::VectorXd& ubar,
                                Eigen::VectorXd* uxbar) const {
  ubar = -(B0_.transpose() * cbar);
  if (zero_mean_) ubar += B0_ones_.dot(cbar) * mean_weights_;
  if (form_ == Formulation::Weak) {
    if (uxbar == nullptr)
      throw std::invalid_argument("ResidualAssembler::adjoint: weak form needs a ux slot");
    *uxbar = -(B1_.transpose() * cbar);
  }
}

}  // namespace wpinn
