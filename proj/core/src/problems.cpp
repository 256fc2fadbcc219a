// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/problems.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace wpinn {

int formulation_sigma(Formulation f) {
  switch (f) {
    case Formulation::Weak:
      return 1;
    case Formulation::UltraWeak:
      return 2;
    case Formulation::Classical:
      break;
  }
  throw std::invalid_argument("formulation_sigma: classical form has no dual-norm index");
}

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::Classical:
      return "classical";
    case Formulation::Weak:
      return "weak";
    case Formulation::UltraWeak:
      return "ultraweak";
  }
  return "?";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "classical") return Formulation::Classical;
  if (s == "weak") return Formulation::Weak;
  if (s == "ultraweak" || s == "ultra-weak") return Formulation::UltraWeak;
  throw std::invalid_argument("unknown formulation: " + s);
}

double DiffusionCoefficient::node_value(int i, const std::vector<double>& mu) const {
  if (i <= 0 || i > param_count) return 1.0;
  return mu.at(static_cast<std::size_t>(i) - 1);
}

double DiffusionCoefficient::value(double x, const std::vector<double>& mu) const {
  double xw = x - std::floor(x);
  const int p = param_count;
  const double h = 1.0 / (p + 1);
  int i = static_cast<int>(std::floor(xw / h)) + 1;  // interval [xi_{i-1}, xi_i)
  if (i > p + 1) i = p + 1;
  const double x0 = breakpoint(i - 1);
  const double m0 = node_value(i - 1, mu);
  const double m1 = node_value(i, mu);
  return m0 + (m1 - m0) * (xw - x0) / h;
}

double DiffusionCoefficient::slope(double x, const std::vector<double>& mu) const {
  double xw = x - std::floor(x);
  const int p = param_count;
  const double h = 1.0 / (p + 1);
  int i = static_cast<int>(std::floor(xw / h)) + 1;
  if (i > p + 1) i = p + 1;
  return (node_value(i, mu) - node_value(i - 1, mu)) / h;
}

double ProblemSpec::A(double x, const std::vector<double>& mu) const {
  if (op == OperatorKind::Poisson) return 1.0;
  return coeff.value(x, mu);
}

double ProblemSpec::A_slope(double x, const std::vector<double>& mu) const {
  if (op == OperatorKind::Poisson) return 0.0;
  return coeff.slope(x, mu);
}

bool ProblemSpec::in_box(const std::vector<double>& mu) const {
  if (static_cast<int>(mu.size()) != param_dim) return false;
  for (int i = 0; i < param_dim; ++i)
    if (mu[static_cast<std::size_t>(i)] < param_box[static_cast<std::size_t>(i)].first ||
        mu[static_cast<std::size_t>(i)] > param_box[static_cast<std::size_t>(i)].second)
      return false;
  return true;
}

double ProblemSpec::alpha(const std::vector<double>& mu) const {
  if (param_dim > 0 && !in_box(mu))
    std::cerr << "[wpinn] warning: alpha(mu) evaluated outside the parameter box of " << id << "\n";
  return stability(mu);
}

double ProblemSpec::continuity(const std::vector<double>& mu) const {
  if (op == OperatorKind::Poisson) return 1.0;
  double amax = 1.0;
  for (int i = 0; i <= coeff.param_count + 1; ++i)
    amax = std::max(amax, coeff.node_value(i, mu));
  return amax;
}

std::vector<double> ProblemSpec::kinks() const {
  if (op == OperatorKind::Poisson) return {};
  std::vector<double> k;
  for (int i = 1; i <= coeff.param_count; ++i) k.push_back(coeff.breakpoint(i));
  return k;
}

std::pair<double, std::optional<double>> manufactured(const std::string& problem_id, double x) {
  const double f = 4.0 * M_PI * M_PI * std::cos(2.0 * M_PI * x);
  if (problem_id == "problem1") return {f, std::cos(2.0 * M_PI * x)};
  if (problem_id == "problem2") return {f, std::nullopt};
  throw std::invalid_argument("manufactured: unknown problem id: " + problem_id);
}

ProblemSpec make_problem(const std::string& id) {
  ProblemSpec p;
  p.id = id;
  p.rhs = [](double x) { return 4.0 * M_PI * M_PI * std::cos(2.0 * M_PI * x); };
  if (id == "problem1") {
    p.op = OperatorKind::Poisson;
    p.param_dim = 0;
    p.exact = [](double x) { return std::cos(2.0 * M_PI * x); };
    p.exact_deriv = [](double x) { return -2.0 * M_PI * std::sin(2.0 * M_PI * x); };
    p.zero_mean_gauge = true;
    // Coercivity of the periodic Laplacian on the zero-mean subspace,
    // expressed against the full H^s norm: inf_{k!=0} (2 pi k)^2/(1+(2 pi k)^2).
    const double a = 4.0 * M_PI * M_PI / (1.0 + 4.0 * M_PI * M_PI);
    p.stability = [a](const std::vector<double>&) { return a; };
    return p;
  }
  if (id == "problem2") {
    p.op = OperatorKind::DiffusionReaction;
    p.param_dim = 2;
    p.param_box = {{0.125, 2.0}, {0.125, 2.0}};
    p.coeff.param_count = 2;
    p.stability = [](const std::vector<double>& mu) {
      double a = 1.0;
      for (double m : mu) a = std::min(a, m);
      return a;
    };
    return p;
  }
  throw std::invalid_argument("make_problem: unknown problem id: " + id);
}

}  // namespace wpinn
