// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/experiment.hpp"

#include "wpinn/spectral.hpp"
#include "wpinn/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace wpinn {

namespace {

using nlohmann::json;

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::ReLU;
  throw std::invalid_argument("config: unknown activation: " + s);
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::ostringstream os;
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  return os.str();
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> ExperimentConfig::provenance() const {
  char hashbuf[32];
  std::snprintf(hashbuf, sizeof(hashbuf), "%016llx", static_cast<unsigned long long>(hash));
  return {
      std::string("wpinn ") + kVersion,
      std::string("config-hash ") + hashbuf,
      "seeds " + join_seeds(train.effective_seeds()),
      "basis weak=cdf(" + std::to_string(weak_basis.first) + "," + std::to_string(weak_basis.second) +
          ") ultraweak=cdf(" + std::to_string(ultraweak_basis.first) + "," +
          std::to_string(ultraweak_basis.second) + ")",
  };
}

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.problem_id = j.value("problem", cfg.problem_id);
  const ProblemSpec problem = make_problem(cfg.problem_id);  // validates the id

  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<int>>();
  cfg.level = j.value("level", cfg.level);
  if (j.contains("weak_basis")) {
    const auto v = j.at("weak_basis").get<std::vector<int>>();
    if (v.size() != 2) throw std::invalid_argument("config: weak_basis must be [d, dt]");
    cfg.weak_basis = {v[0], v[1]};
  }
  if (j.contains("ultraweak_basis")) {
    const auto v = j.at("ultraweak_basis").get<std::vector<int>>();
    if (v.size() != 2) throw std::invalid_argument("config: ultraweak_basis must be [d, dt]");
    cfg.ultraweak_basis = {v[0], v[1]};
  }
  cfg.quad_points = j.value("quad_points", cfg.quad_points);
  if (j.contains("omega_b")) {
    cfg.omega_b_low = j.at("omega_b").value("low", cfg.omega_b_low);
    cfg.omega_b_high = j.at("omega_b").value("high", cfg.omega_b_high);
  }

  if (j.contains("formulation")) {
    const auto s = j.at("formulation").get<std::string>();
    if (s == "mse") {
      cfg.train_kind = LossKind::Mse;
      cfg.formulation = Formulation::Classical;  // unused for mse
    } else if (s == "classical") {
      cfg.train_kind = LossKind::Classical;
      cfg.formulation = Formulation::Classical;
    } else {
      cfg.formulation = formulation_from_string(s);
      cfg.train_kind = cfg.formulation == Formulation::Weak ? LossKind::WaveletWeak
                                                            : LossKind::WaveletUltraWeak;
    }
  }

  if (j.contains("architecture")) {
    const auto& a = j.at("architecture");
    cfg.arch.widths = a.at("widths").get<std::vector<int>>();
    cfg.arch.activation = activation_from_string(a.value("activation", std::string("tanh")));
  } else {
    cfg.arch.widths = {1 + problem.param_dim, 64, 64, 64, 1};
    cfg.arch.activation = Activation::Tanh;
  }
  cfg.arch.validate();
  if (cfg.arch.input_dim() != 1 + problem.param_dim)
    throw std::invalid_argument("config: architecture input dimension must be 1 + p");

  if (j.contains("train")) {
    const auto& t = j.at("train");
    cfg.train.restarts = t.value("restarts", cfg.train.restarts);
    cfg.train.max_iters = t.value("max_iters", cfg.train.max_iters);
    if (t.contains("optimizer")) {
      const auto s = t.at("optimizer").get<std::string>();
      if (s == "lbfgs")
        cfg.train.optimizer = OptimizerKind::Lbfgs;
      else if (s == "adam")
        cfg.train.optimizer = OptimizerKind::Adam;
      else
        throw std::invalid_argument("config: unknown optimizer: " + s);
    }
    if (t.contains("seeds")) cfg.train.seeds = t.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.train.grad_tol = t.value("grad_tol", cfg.train.grad_tol);
    cfg.train.threads = t.value("threads", cfg.train.threads);
    cfg.train.validate();
  }
  cfg.ultraweak_iter_factor = j.value("ultraweak_iter_factor", cfg.ultraweak_iter_factor);
  cfg.mu_grid_points = j.value("mu_grid_points", cfg.mu_grid_points);
  cfg.constants_level = j.value("constants_level", cfg.constants_level);
  cfg.fem_cells = j.value("fem_cells", cfg.fem_cells);
  cfg.bench_repetitions = j.value("bench_repetitions", cfg.bench_repetitions);
  cfg.gnuplot = j.value("gnuplot", cfg.gnuplot);
  if (j.contains("model_path")) cfg.model_path = j.at("model_path").get<std::string>();

  cfg.canonical_json = j.dump();
  cfg.hash = fnv1a(cfg.canonical_json);
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_json(buf.str());
}

std::vector<std::vector<double>> mu_grid(const ProblemSpec& problem, int points_per_dim) {
  if (problem.param_dim == 0) return {{}};
  std::vector<std::vector<double>> axes;
  for (int d = 0; d < problem.param_dim; ++d) {
    const auto [lo, hi] = problem.param_box[static_cast<std::size_t>(d)];
    std::vector<double> axis;
    for (int i = 0; i < points_per_dim; ++i)
      axis.push_back(points_per_dim == 1 ? lo : lo + (hi - lo) * i / (points_per_dim - 1));
    axes.push_back(std::move(axis));
  }
  // row-major enumeration: the last coordinate varies fastest
  std::vector<std::vector<double>> grid;
  std::vector<int> idx(static_cast<std::size_t>(problem.param_dim), 0);
  while (true) {
    std::vector<double> mu;
    for (int d = 0; d < problem.param_dim; ++d)
      mu.push_back(axes[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])]);
    grid.push_back(std::move(mu));
    int d = problem.param_dim - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == points_per_dim) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return grid;
}

namespace {

struct VariantOutcome {
  double mean_error = std::numeric_limits<double>::quiet_NaN();
  double mean_bound = std::numeric_limits<double>::quiet_NaN();
};

void write_header(std::ofstream& os, const ExperimentConfig& cfg) {
  for (const auto& line : cfg.provenance()) os << "# " << line << "\n";
}

TrainConfig train_config_for(const ExperimentConfig& cfg, LossKind kind) {
  TrainConfig t = cfg.train;
  if (kind == LossKind::WaveletUltraWeak)
    t.max_iters = static_cast<int>(std::lround(t.max_iters * cfg.ultraweak_iter_factor));
  return t;
}

// Trains one variant and reports mean gauged error plus, for wavelet kinds,
// the mean certified bound.
VariantOutcome run_variant(const ExperimentConfig& cfg, const ProblemSpec& problem, LossKind kind,
                           int level, double omega_b, const NormEquivalence* constants,
                           const WaveletBasis* basis, ErrorNorm err_norm, const TruthFn& truth,
                           const std::vector<std::vector<double>>& mu_samples) {
  LossConfig lc;
  lc.kind = kind;
  lc.level = level;
  lc.omega_b = omega_b;
  lc.quad_points = cfg.quad_points;
  lc.mu_samples = mu_samples;
  if (basis) lc.basis = *basis;

  const LossFunction loss(problem, cfg.arch, lc);
  const std::vector<RestartResult> results = train(loss, train_config_for(cfg, kind));

  // gauge: everything but supervised MSE on a zero-mean problem
  const bool gauge = problem.zero_mean_gauge && kind != LossKind::Mse;

  std::vector<double> errors, bounds;
  std::unique_ptr<Certifier> cert;
  if (constants && basis) {
    const Formulation form =
        kind == LossKind::WaveletWeak ? Formulation::Weak : Formulation::UltraWeak;
    cert = std::make_unique<Certifier>(problem, cfg.arch, form, *basis, level, *constants,
                                       cfg.quad_points);
  }
  for (const auto& r : results) {
    if (r.failed) {
      std::cerr << "[wpinn] restart seed " << r.seed << " failed: " << r.diagnostic << "\n";
      continue;
    }
    double err_acc = 0.0, bound_acc = 0.0;
    for (const auto& mu : mu_samples) {
      err_acc += solution_error(cfg.arch, r.theta, truth, mu, loss.training_mesh(), err_norm, gauge);
      if (cert) bound_acc += cert->error_bound(r.theta, mu);
    }
    errors.push_back(err_acc / static_cast<double>(mu_samples.size()));
    if (cert) bounds.push_back(bound_acc / static_cast<double>(mu_samples.size()));
  }

  VariantOutcome out;
  if (!errors.empty()) out.mean_error = aggregate(errors).mean;
  if (!bounds.empty()) out.mean_bound = aggregate(bounds).mean;
  return out;
}

}  // namespace

std::filesystem::path run_fig1(const ExperimentConfig& cfg) {
  const ProblemSpec problem = make_problem(cfg.problem_id);
  if (!problem.exact)
    throw std::invalid_argument("run_fig1: needs a problem with a known solution");
  const WaveletBasis weak_basis = make_basis(cfg.weak_basis.first, cfg.weak_basis.second);
  const WaveletBasis uw_basis = make_basis(cfg.ultraweak_basis.first, cfg.ultraweak_basis.second);

  const int max_level = *std::max_element(cfg.levels.begin(), cfg.levels.end());
  const int jc = std::max(cfg.constants_level, max_level);
  const NormEquivalence weak_consts = estimate_norm_constants(weak_basis, -1.0, jc);
  const NormEquivalence uw_consts = estimate_norm_constants(uw_basis, -2.0, jc);

  TruthFn truth;
  truth.value = problem.exact;
  truth.deriv = problem.exact_deriv;

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "fig1.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("run_fig1: cannot open " + path.string());
  write_header(os, cfg);
  os << "level,wError,wEstError,PINNError01,uwError,EstError,PINNError10,MSEError\n";
  os.precision(12);

  const std::vector<std::vector<double>> mu = {{}};
  for (int level : cfg.levels) {
    std::cerr << "[wpinn] fig1 level " << level << "\n";
    const VariantOutcome weak = run_variant(cfg, problem, LossKind::WaveletWeak, level,
                                            cfg.omega_b_high, &weak_consts, &weak_basis,
                                            ErrorNorm::L2, truth, mu);
    const VariantOutcome cls_low = run_variant(cfg, problem, LossKind::Classical, level,
                                               cfg.omega_b_low, nullptr, nullptr, ErrorNorm::L2,
                                               truth, mu);
    const VariantOutcome uw = run_variant(cfg, problem, LossKind::WaveletUltraWeak, level,
                                          cfg.omega_b_high, &uw_consts, &uw_basis, ErrorNorm::L2,
                                          truth, mu);
    const VariantOutcome cls_high = run_variant(cfg, problem, LossKind::Classical, level,
                                                cfg.omega_b_high, nullptr, nullptr, ErrorNorm::L2,
                                                truth, mu);
    const VariantOutcome mse = run_variant(cfg, problem, LossKind::Mse, level, cfg.omega_b_high,
                                           nullptr, nullptr, ErrorNorm::L2, truth, mu);
    os << level << "," << weak.mean_error << "," << weak.mean_bound << "," << cls_low.mean_error
       << "," << uw.mean_error << "," << uw.mean_bound << "," << cls_high.mean_error << ","
       << mse.mean_error << "\n";
    os.flush();
  }
  if (cfg.gnuplot) {
    std::ofstream gp(cfg.out_dir / "fig1.gp");
    gp << "set datafile separator ','\nset logscale y\nset xlabel 'level J'\nset ylabel 'L2 error'\n"
          "set key bottom left\n"
          "plot 'fig1.csv' using 1:2 with linespoints title 'weak', \\\n"
          "     'fig1.csv' using 1:3 with linespoints dashtype 2 title 'estimate weak', \\\n"
          "     'fig1.csv' using 1:4 with linespoints title 'classical 0.1', \\\n"
          "     'fig1.csv' using 1:5 with linespoints title 'ultra-weak', \\\n"
          "     'fig1.csv' using 1:6 with linespoints dashtype 2 title 'estimate ultra-weak', \\\n"
          "     'fig1.csv' using 1:7 with linespoints title 'classical 10', \\\n"
          "     'fig1.csv' using 1:8 with linespoints title 'nn'\n";
  }
  return path;
}

std::filesystem::path run_param_study(const ExperimentConfig& cfg) {
  const ProblemSpec problem = make_problem(cfg.problem_id);
  if (problem.param_dim == 0)
    throw std::invalid_argument("run_param_study: needs a parameterized problem");
  const WaveletBasis weak_basis = make_basis(cfg.weak_basis.first, cfg.weak_basis.second);
  const WaveletBasis uw_basis = make_basis(cfg.ultraweak_basis.first, cfg.ultraweak_basis.second);
  const int jc = std::max(cfg.constants_level, cfg.level);
  const NormEquivalence weak_consts = estimate_norm_constants(weak_basis, -1.0, jc);
  const NormEquivalence uw_consts = estimate_norm_constants(uw_basis, -2.0, jc);

  const std::vector<std::vector<double>> grid = mu_grid(problem, cfg.mu_grid_points);

  auto train_one = [&](LossKind kind, const WaveletBasis& basis) {
    LossConfig lc;
    lc.kind = kind;
    lc.level = cfg.level;
    lc.quad_points = cfg.quad_points;
    lc.mu_samples = grid;
    lc.basis = basis;
    const LossFunction loss(problem, cfg.arch, lc);
    std::vector<RestartResult> rs = train(loss, train_config_for(cfg, kind));
    // best restart by final loss among the successful ones
    std::size_t best = rs.size();
    for (std::size_t i = 0; i < rs.size(); ++i)
      if (!rs[i].failed && (best == rs.size() || rs[i].final_loss < rs[best].final_loss)) best = i;
    if (best == rs.size()) throw std::runtime_error("run_param_study: every restart failed");
    return rs[best].theta;
  };

  std::cerr << "[wpinn] param study: training weak\n";
  const Params theta_w = train_one(LossKind::WaveletWeak, weak_basis);
  std::cerr << "[wpinn] param study: training ultra-weak\n";
  const Params theta_uw = train_one(LossKind::WaveletUltraWeak, uw_basis);

  const Certifier cert_w(problem, cfg.arch, Formulation::Weak, weak_basis, cfg.level, weak_consts,
                         cfg.quad_points);
  const Certifier cert_uw(problem, cfg.arch, Formulation::UltraWeak, uw_basis, cfg.level, uw_consts,
                          cfg.quad_points);

  const QuadMesh err_mesh = QuadMesh::dyadic(cfg.level, cfg.quad_points, problem.kinks());

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "param_study.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("run_param_study: cannot open " + path.string());
  write_header(os, cfg);
  os << "NoParam,mu1,mu2,H1Error,EstH1w,L2Erroruw,Estuw\n";
  os.precision(12);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& mu = grid[i];
    const TruthFn truth = truth_from_grid(fem_reference(problem, mu, cfg.fem_cells));
    const double h1 =
        solution_error(cfg.arch, theta_w, truth, mu, err_mesh, ErrorNorm::H1, problem.zero_mean_gauge);
    const double l2 = solution_error(cfg.arch, theta_uw, truth, mu, err_mesh, ErrorNorm::L2,
                                     problem.zero_mean_gauge);
    const double est_w = cert_w.error_bound(theta_w, mu);
    const double est_uw = cert_uw.error_bound(theta_uw, mu);
    os << (i + 1) << "," << mu[0] << "," << mu[1] << "," << h1 << "," << est_w << "," << l2 << ","
       << est_uw << "\n";
  }
  if (cfg.gnuplot) {
    std::ofstream gp(cfg.out_dir / "param_study.gp");
    gp << "set datafile separator ','\nset logscale y\nset xlabel 'parameter index'\n"
          "plot 'param_study.csv' using 1:4 with linespoints title 'H1 error weak', \\\n"
          "     'param_study.csv' using 1:5 with linespoints title 'estimate weak', \\\n"
          "     'param_study.csv' using 1:6 with linespoints title 'L2 error ultra-weak', \\\n"
          "     'param_study.csv' using 1:7 with linespoints title 'estimate ultra-weak'\n";
  }
  return path;
}

std::filesystem::path run_bench(const ExperimentConfig& cfg) {
  const ProblemSpec problem = make_problem(cfg.problem_id);
  const WaveletBasis weak_basis = make_basis(cfg.weak_basis.first, cfg.weak_basis.second);
  const WaveletBasis uw_basis = make_basis(cfg.ultraweak_basis.first, cfg.ultraweak_basis.second);
  const Params theta = init_params(cfg.arch, cfg.train.effective_seeds().front());

  auto median_time = [&](const LossFunction& loss) {
    std::vector<double> times;
    const int reps = std::max(1, cfg.bench_repetitions);
    double sink = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      sink += loss.value(theta);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    if (!std::isfinite(sink)) std::cerr << "[wpinn] bench: non-finite loss value\n";
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "bench.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("run_bench: cannot open " + path.string());
  write_header(os, cfg);
  os << "level,ultraweak_s,weak_s,classical_s,nn_s\n";

  for (int level : cfg.levels) {
    std::cerr << "[wpinn] bench level " << level << "\n";
    LossConfig base;
    base.level = level;
    base.quad_points = cfg.quad_points;
    base.omega_b = cfg.omega_b_high;
    base.mu_samples = {std::vector<double>(static_cast<std::size_t>(problem.param_dim), 1.0)};

    LossConfig uw = base;
    uw.kind = LossKind::WaveletUltraWeak;
    uw.basis = uw_basis;
    LossConfig weak = base;
    weak.kind = LossKind::WaveletWeak;
    weak.basis = weak_basis;
    LossConfig cls = base;
    cls.kind = LossKind::Classical;

    os << level << "," << median_time(LossFunction(problem, cfg.arch, uw)) << ","
       << median_time(LossFunction(problem, cfg.arch, weak)) << ","
       << median_time(LossFunction(problem, cfg.arch, cls));
    if (problem.exact) {
      LossConfig mse = base;
      mse.kind = LossKind::Mse;
      os << "," << median_time(LossFunction(problem, cfg.arch, mse)) << "\n";
    } else {
      os << ",nan\n";
    }
    os.flush();
  }
  return path;
}

TrainOutputs run_train(const ExperimentConfig& cfg) {
  const ProblemSpec problem = make_problem(cfg.problem_id);
  LossConfig lc;
  lc.kind = cfg.train_kind;
  lc.level = cfg.level;
  lc.omega_b = cfg.omega_b_high;
  lc.quad_points = cfg.quad_points;
  lc.mu_samples = (problem.param_dim == 0) ? std::vector<std::vector<double>>{{}}
                                           : mu_grid(problem, cfg.mu_grid_points);
  if (cfg.train_kind == LossKind::WaveletWeak)
    lc.basis = make_basis(cfg.weak_basis.first, cfg.weak_basis.second);
  else if (cfg.train_kind == LossKind::WaveletUltraWeak)
    lc.basis = make_basis(cfg.ultraweak_basis.first, cfg.ultraweak_basis.second);

  const LossFunction loss(problem, cfg.arch, lc);
  std::filesystem::create_directories(cfg.out_dir);

  TrainConfig tc = train_config_for(cfg, cfg.train_kind);
  tc.log_path = (cfg.out_dir / "training_log.csv").string();
  const std::vector<RestartResult> results = train(loss, tc);

  std::size_t best = results.size();
  std::vector<double> losses;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].failed) continue;
    losses.push_back(results[i].final_loss);
    if (best == results.size() || results[i].final_loss < results[best].final_loss) best = i;
  }
  if (best == results.size()) throw std::runtime_error("run_train: every restart failed");

  TrainOutputs out;
  out.model = cfg.out_dir / "model.wnet";
  out.log = tc.log_path;
  out.mean_final_loss = aggregate(losses).mean;
  write_params(out.model, cfg.arch, results[best].theta);
  return out;
}

std::filesystem::path run_certify(const ExperimentConfig& cfg, const std::filesystem::path& model) {
  const ProblemSpec problem = make_problem(cfg.problem_id);
  const ParamsFile pf = read_params(model);

  const Formulation form = cfg.formulation == Formulation::UltraWeak ? Formulation::UltraWeak
                                                                     : Formulation::Weak;
  const auto [bd, bdt] =
      form == Formulation::Weak ? cfg.weak_basis : cfg.ultraweak_basis;
  const WaveletBasis basis = make_basis(bd, bdt);
  const int jc = std::max(cfg.constants_level, cfg.level);
  const NormEquivalence consts =
      estimate_norm_constants(basis, -static_cast<double>(formulation_sigma(form)), jc);
  const Certifier cert(problem, pf.arch, form, basis, cfg.level, consts, cfg.quad_points);

  const std::vector<std::vector<double>> grid =
      (problem.param_dim == 0) ? std::vector<std::vector<double>>{{}}
                               : mu_grid(problem, cfg.mu_grid_points);
  const QuadMesh err_mesh = QuadMesh::dyadic(cfg.level, cfg.quad_points, problem.kinks());

  CertifiedSolution sol = certify_over(cert, problem, pf.theta, grid);
  if (problem.exact) {
    TruthFn truth;
    truth.value = problem.exact;
    truth.deriv = problem.exact_deriv;
    const ErrorNorm norm = form == Formulation::Weak ? ErrorNorm::H1 : ErrorNorm::L2;
    for (auto& row : sol.records) {
      row.error =
          solution_error(pf.arch, pf.theta, truth, row.mu, err_mesh, norm, problem.zero_mean_gauge);
      row.effectivity = effectivity(row.eta, row.error);
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "certificate.csv";
  write_certificate_csv(path, problem.param_dim, sol.records, cfg.provenance());
  return path;
}

}  // namespace wpinn
