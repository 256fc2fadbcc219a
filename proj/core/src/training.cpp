// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/training.hpp"

#include "wpinn/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <future>
#include <stdexcept>

namespace wpinn {

void TrainConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("TrainConfig: restarts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("TrainConfig: max_iters must be >= 1");
  if (!seeds.empty() && static_cast<int>(seeds.size()) != restarts)
    throw std::invalid_argument("TrainConfig: restarts must equal |seeds|");
}

std::vector<std::uint64_t> TrainConfig::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> s(static_cast<std::size_t>(restarts));
  for (int i = 0; i < restarts; ++i) s[static_cast<std::size_t>(i)] = 1000 + 7 * static_cast<std::uint64_t>(i);
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Strong-Wolfe line search (bracket + zoom with bisection/interpolation).
// Returns the accepted step, or 0 on failure. phi(a) = f(x + a p).
struct LineSearchFn {
  const Objective& fn;
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& p;
  Eigen::VectorXd xt, gt;
  double f_at = 0, d_at = 0;

  void eval(double a) {
    xt = x + a * p;
    f_at = fn(xt, gt);
    d_at = gt.dot(p);
  }
};

bool wolfe_search(LineSearchFn& ls, double f0, double d0, double& alpha_out) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  const double amax = 1e10;
  double a_prev = 0.0, f_prev = f0;
  double a = std::min(1.0, amax);

  double lo = 0, hi = 0, f_lo = f0;
  bool bracketed = false;
  for (int it = 0; it < 30 && !bracketed; ++it) {
    ls.eval(a);
    if (!std::isfinite(ls.f_at)) {
      a = 0.5 * (a_prev + a);
      continue;
    }
    if (ls.f_at > f0 + c1 * a * d0 || (it > 0 && ls.f_at >= f_prev)) {
      lo = a_prev;
      hi = a;
      bracketed = true;
      break;
    }
    if (std::abs(ls.d_at) <= -c2 * d0) {
      alpha_out = a;
      return true;
    }
    if (ls.d_at >= 0) {
      lo = a;
      hi = a_prev;
      f_lo = ls.f_at;
      bracketed = true;
      break;
    }
    a_prev = a;
    f_prev = ls.f_at;
    a = std::min(2.0 * a, amax);
  }
  if (!bracketed) return false;

  // zoom
  for (int it = 0; it < 40; ++it) {
    const double a_mid = 0.5 * (lo + hi);
    ls.eval(a_mid);
    if (!std::isfinite(ls.f_at) || ls.f_at > f0 + c1 * a_mid * d0 || ls.f_at >= f_lo) {
      hi = a_mid;
      continue;
    }
    if (std::abs(ls.d_at) <= -c2 * d0) {
      alpha_out = a_mid;
      return true;
    }
    if (ls.d_at * (hi - lo) >= 0) hi = lo;
    lo = a_mid;
    f_lo = ls.f_at;
    if (std::abs(hi - lo) < 1e-14 * std::max(1.0, std::abs(lo))) break;
  }
  // fall back to the best Armijo point found
  if (f_lo < f0 && lo > 0) {
    alpha_out = lo;
    return true;
  }
  return false;
}

}  // namespace

OptimResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const OptimOptions& opts) {
  const auto t0 = Clock::now();
  OptimResult res;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  double f = fn(x, g);
  if (!std::isfinite(f) || !g.allFinite()) {
    res.failed = true;
    res.diagnostic = "non-finite loss or gradient at the initial point";
    res.x = std::move(x);
    res.f = f;
    return res;
  }
  res.trace.push_back({0, f, g.norm(), ms_since(t0)});

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;

  LineSearchFn ls{fn, x, x, {}, {}, 0, 0};

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double gnorm = g.norm();
    if (gnorm <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      const auto iu = static_cast<std::size_t>(i);
      alpha[iu] = rho[iu] * S[iu].dot(q);
      q -= alpha[iu] * Y[iu];
    }
    if (!S.empty()) {
      const double gamma = S.back().dot(Y.back()) / Y.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(q);
      q += (alpha[i] - beta) * S[i];
    }
    Eigen::VectorXd p = -q;

    double d0 = g.dot(p);
    if (!(d0 < 0)) {  // not a descent direction: restart from steepest descent
      p = -g;
      d0 = -gnorm * gnorm;
      S.clear();
      Y.clear();
      rho.clear();
    }

    LineSearchFn search{fn, x, p, {}, {}, 0, 0};
    double step = 0;
    if (!wolfe_search(search, f, d0, step)) {
      res.diagnostic = "line search failed";
      break;
    }
    search.eval(step);
    const Eigen::VectorXd x_new = search.xt;
    const Eigen::VectorXd g_new = search.gt;
    const double f_new = search.f_at;
    if (!std::isfinite(f_new) || !g_new.allFinite()) {
      res.failed = true;
      res.diagnostic = "non-finite loss or gradient during optimization";
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = x_new;
    g = g_new;
    f = f_new;
    res.trace.push_back({it + 1, f, g.norm(), ms_since(t0)});
  }

  res.x = std::move(x);
  res.f = f;
  res.iterations = it;
  return res;
}

OptimResult adam_minimize(const Objective& fn, Eigen::VectorXd x0, const OptimOptions& opts) {
  const auto t0 = Clock::now();
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  OptimResult res;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  double f = 0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    f = fn(x, g);
    if (!std::isfinite(f) || !g.allFinite()) {
      res.failed = true;
      res.diagnostic = "non-finite loss or gradient during optimization";
      break;
    }
    const double gnorm = g.norm();
    res.trace.push_back({it, f, gnorm, ms_since(t0)});
    if (gnorm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    m = b1 * m + (1 - b1) * g;
    v = b2 * v.array().matrix() + (1 - b2) * g.cwiseProduct(g);
    const double bc1 = 1 - std::pow(b1, it + 1);
    const double bc2 = 1 - std::pow(b2, it + 1);
    x.array() -= opts.adam_lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  }
  if (!res.failed) f = fn(x, g);
  res.x = std::move(x);
  res.f = f;
  res.iterations = it;
  return res;
}

std::vector<RestartResult> train(const LossFunction& loss, const TrainConfig& cfg) {
  cfg.validate();
  const auto seeds = cfg.effective_seeds();
  const Architecture& arch = loss.architecture();

  auto run_one = [&](std::size_t idx) -> std::pair<RestartResult, std::vector<OptimTraceRow>> {
    const std::uint64_t seed = seeds[idx];
    const Params theta0 = init_params(arch, seed);
    Objective fn = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& gv) {
      Params grad;
      const double f = loss.value_and_grad(Params::unpack(arch, xv), grad);
      gv = grad.pack();
      return f;
    };
    OptimOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.grad_tol = cfg.grad_tol;
    const OptimResult r = (cfg.optimizer == OptimizerKind::Lbfgs)
                              ? lbfgs_minimize(fn, theta0.pack(), opts)
                              : adam_minimize(fn, theta0.pack(), opts);
    RestartResult out;
    out.seed = seed;
    out.theta = Params::unpack(arch, r.x);
    out.final_loss = r.f;
    out.iterations = r.iterations;
    out.failed = r.failed;
    out.diagnostic = r.diagnostic;
    return {std::move(out), r.trace};
  };

  std::vector<RestartResult> results(seeds.size());
  std::vector<std::vector<OptimTraceRow>> traces(seeds.size());
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || seeds.size() == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      auto [r, t] = run_one(i);
      results[i] = std::move(r);
      traces[i] = std::move(t);
    }
  } else {
    // Independent restarts run in waves; results land in seed order
    // regardless of completion timing.
    const auto stride = static_cast<std::size_t>(threads);
    for (std::size_t base = 0; base < seeds.size(); base += stride) {
      std::vector<std::future<std::pair<RestartResult, std::vector<OptimTraceRow>>>> wave;
      const std::size_t end = std::min(base + stride, seeds.size());
      for (std::size_t i = base; i < end; ++i)
        wave.push_back(std::async(std::launch::async, run_one, i));
      for (std::size_t i = base; i < end; ++i) {
        auto [r, t] = wave[i - base].get();
        results[i] = std::move(r);
        traces[i] = std::move(t);
      }
    }
  }

  if (!cfg.log_path.empty()) {
    std::ofstream os(cfg.log_path);
    if (!os) throw std::runtime_error("train: cannot open log " + cfg.log_path);
    os << "restart,iter,loss,grad_norm,wall_ms\n";
    os.precision(12);
    for (std::size_t i = 0; i < traces.size(); ++i)
      for (const auto& row : traces[i])
        os << i << "," << row.iter << "," << row.loss << "," << row.grad_norm << "," << row.wall_ms
           << "\n";
  }
  return results;
}

TruthFn truth_from_grid(const GridFunction& g) {
  // copy the samples into the closures; derivative is the cellwise slope
  auto values = std::make_shared<GridFunction>(g);
  TruthFn t;
  t.value = [values](double x) { return values->value_at(x); };
  t.deriv = [values](double x) {
    const int n = values->size();
    const double xt = (x - std::floor(x)) * n;
    const int i = static_cast<int>(std::floor(xt));
    return (values->values[(i + 1) % n] - values->values[i % n]) * n;
  };
  return t;
}

double solution_error(const Architecture& arch, const Params& theta, const TruthFn& truth,
                      const std::vector<double>& mu, const QuadMesh& mesh, ErrorNorm norm,
                      bool zero_mean_gauge) {
  const int n = mesh.node_count();
  Eigen::MatrixXd Z(1 + mu.size(), n);
  for (int i = 0; i < n; ++i) {
    Z(0, i) = mesh.nodes[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < mu.size(); ++m) Z(1 + static_cast<Eigen::Index>(m), i) = mu[m];
  }
  const JetBatch jets = forward_jet_batch(arch, theta, Z, norm == ErrorNorm::H1 ? 1 : 0);

  double net_mean = 0.0, truth_mean = 0.0;
  if (zero_mean_gauge) {
    for (int i = 0; i < n; ++i) {
      net_mean += mesh.weights[static_cast<std::size_t>(i)] * jets.u[i];
      truth_mean += mesh.weights[static_cast<std::size_t>(i)] * truth.value(Z(0, i));
    }
  }

  double l2 = 0.0, h1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = mesh.weights[static_cast<std::size_t>(i)];
    const double x = Z(0, i);
    const double e = (jets.u[i] - net_mean) - (truth.value(x) - truth_mean);
    l2 += w * e * e;
    if (norm == ErrorNorm::H1) {
      const double ed = jets.ux[i] - truth.deriv(x);
      h1 += w * ed * ed;
    }
  }
  return std::sqrt(l2 + h1);
}

ErrorStats aggregate(const std::vector<double>& per_restart_errors) {
  if (per_restart_errors.empty()) throw std::invalid_argument("aggregate: no restart results");
  ErrorStats s;
  s.per_restart = per_restart_errors;
  s.min_v = s.max_v = per_restart_errors.front();
  double sum = 0.0;
  for (double e : per_restart_errors) {
    sum += e;
    s.min_v = std::min(s.min_v, e);
    s.max_v = std::max(s.max_v, e);
  }
  s.mean = sum / static_cast<double>(per_restart_errors.size());
  return s;
}

}  // namespace wpinn
