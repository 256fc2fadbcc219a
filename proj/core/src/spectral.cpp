// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

namespace wpinn {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(Eigen::Index n) {
  return n > 0 && std::has_single_bit(static_cast<std::uint64_t>(n));
}

}  // namespace

double GridFunction::value_at(double x) const {
  const int n = size();
  const double t = (x - std::floor(x)) * n;
  const int i = static_cast<int>(std::floor(t));
  const double frac = t - i;
  const double v0 = values[i % n];
  const double v1 = values[(i + 1) % n];
  return v0 + frac * (v1 - v0);
}

Eigen::VectorXcd fourier_coefficients(const GridFunction& g) {
  const int n = g.size();
  if (n < 2) throw std::invalid_argument("fourier_coefficients: need at least 2 samples");
  Eigen::VectorXcd out(n / 2 + 1);
  std::vector<double> in(g.values.data(), g.values.data() + n);
  std::vector<fftw_complex> spec(static_cast<std::size_t>(n / 2 + 1));
  {
    // FFTW planning is not thread-safe; execution of a fresh plan is fine.
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), spec.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  for (int k = 0; k <= n / 2; ++k)
    out[k] = std::complex<double>(spec[static_cast<std::size_t>(k)][0],
                                  spec[static_cast<std::size_t>(k)][1]) /
             static_cast<double>(n);
  return out;
}

double sobolev_norm(const GridFunction& g, double sigma) {
  if (g.size() < 4) throw std::invalid_argument("sobolev_norm: need n >= 4");
  const Eigen::VectorXcd c = fourier_coefficients(g);
  const int n = g.size();
  double s = std::norm(c[0]);
  for (int k = 1; k < n / 2; ++k) {
    const double w2 = std::pow(2.0 * M_PI * k, 2);
    s += 2.0 * std::pow(1.0 + w2, sigma) * std::norm(c[k]);
  }
  return std::sqrt(s);
}

double sobolev_inner(const GridFunction& g, const GridFunction& h, double sigma) {
  if (g.size() != h.size()) throw std::invalid_argument("sobolev_inner: size mismatch");
  const Eigen::VectorXcd cg = fourier_coefficients(g);
  const Eigen::VectorXcd ch = fourier_coefficients(h);
  const int n = g.size();
  double s = (cg[0] * std::conj(ch[0])).real();
  for (int k = 1; k < n / 2; ++k) {
    const double w2 = std::pow(2.0 * M_PI * k, 2);
    s += 2.0 * std::pow(1.0 + w2, sigma) * (cg[k] * std::conj(ch[k])).real();
  }
  return s;
}

GridFunction fem_reference(const ProblemSpec& problem, const std::vector<double>& mu, int cells) {
  if (!is_power_of_two(cells) || cells < 16)
    throw std::invalid_argument("fem_reference: cells must be a power of two >= 16");
  const int n = cells;
  const double h = 1.0 / n;
  const bool gauged = (problem.op == OperatorKind::Poisson);
  const bool reaction = (problem.op == OperatorKind::DiffusionReaction);

  // Exact per-element integral of the piecewise-affine A (split at kinks).
  const std::vector<double> kinks = problem.kinks();
  auto int_A = [&](double a, double b) {
    std::vector<double> cuts{a};
    for (double s : kinks)
      if (s > a + 1e-15 && s < b - 1e-15) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double m = 0.5 * (cuts[i] + cuts[i + 1]);
      v += problem.A(m, mu) * (cuts[i + 1] - cuts[i]);  // trapezoid == midpoint for affine pieces
    }
    return v;
  };

  std::vector<double> gn, gw;
  gauss_legendre(5, gn, gw);

  const int dim = gauged ? n + 1 : n;
  Eigen::SparseMatrix<double> K(dim, dim);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(6 * n));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  for (int e = 0; e < n; ++e) {
    const double xa = e * h;
    const int i0 = e, i1 = (e + 1) % n;
    const double aint = int_A(xa, xa + h);
    const double ke = aint / (h * h);
    double me[2][2] = {{0, 0}, {0, 0}};
    if (reaction) {
      me[0][0] = me[1][1] = h / 3.0;
      me[0][1] = me[1][0] = h / 6.0;
    }
    trip.emplace_back(i0, i0, ke + me[0][0]);
    trip.emplace_back(i0, i1, -ke + me[0][1]);
    trip.emplace_back(i1, i0, -ke + me[1][0]);
    trip.emplace_back(i1, i1, ke + me[1][1]);
    for (int q = 0; q < 5; ++q) {
      const double x = xa + 0.5 * h * (1.0 + gn[static_cast<std::size_t>(q)]);
      const double w = 0.5 * h * gw[static_cast<std::size_t>(q)];
      const double fx = problem.rhs(x);
      const double t = (x - xa) / h;
      rhs[i0] += w * fx * (1.0 - t);
      rhs[i1] += w * fx * t;
    }
  }
  if (gauged) {
    // Zero-mean constraint row/column (Lagrange multiplier).
    for (int i = 0; i < n; ++i) {
      trip.emplace_back(i, n, h);
      trip.emplace_back(n, i, h);
    }
  }
  K.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(K);
  if (solver.info() != Eigen::Success) throw std::runtime_error("fem_reference: factorization failed");
  const Eigen::VectorXd u = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("fem_reference: singular system");

  GridFunction out;
  out.values = u.head(n);
  return out;
}

double SampledFunction::at(double x) const {
  const double t = (x - x0) / step;
  const int i = static_cast<int>(std::floor(t));
  if (i < 0 || i + 1 >= size()) {
    if (i == size() - 1 && std::abs(t - i) < 1e-12) return values[i];
    return 0.0;
  }
  const double frac = t - i;
  return values[i] + frac * (values[i + 1] - values[i]);
}

namespace {

// Integer-lattice fixed point of g(x) = sum_k m_k g(2x - k), normalized to
// sum 1 (the periodization of either scaling function is identically one).
Eigen::VectorXd refinement_lattice_values(const Mask& m, int& lo_out) {
  const int lo = m.lo, hi = m.hi();
  const int len = hi - lo + 1;  // integer points lo..hi
  Eigen::VectorXd v = Eigen::VectorXd::Zero(len);
  v[len / 2] = 1.0;
  double residual = 1.0;
  const int max_iters = 500;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(len);
    for (int x = lo; x <= hi; ++x) {
      double s = 0.0;
      for (int k = lo; k <= hi; ++k) {
        const int arg = 2 * x - k;
        if (arg >= lo && arg <= hi) s += m.at(k) * v[arg - lo];
      }
      next[x - lo] = s;
    }
    const double norm = next.sum();
    if (std::abs(norm) > 1e-300) next /= norm;
    residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (residual < 1e-13) break;
  }
  if (!(residual < 1e-8))
    throw std::runtime_error("cascade_values: lattice iteration did not converge (residual " +
                             std::to_string(residual) + ")");
  lo_out = lo;
  return v;
}

// One exact dyadic refinement: given values at step s on [lo, hi], produce
// values at step s/2 via the two-scale relation.
Eigen::VectorXd refine_once(const Eigen::VectorXd& v, const Mask& m, int lo, int level) {
  // level: current step is 2^{-level}; positions x = lo + i * 2^{-level}.
  const Eigen::Index n_new = 2 * (v.size() - 1) + 1;
  Eigen::VectorXd out(n_new);
  for (Eigen::Index i = 0; i < n_new; ++i) {
    if (i % 2 == 0) {
      out[i] = v[i / 2];
      continue;
    }
    // x = lo + i * 2^{-(level+1)}; g(x) = sum_k m_k g(2x - k), and 2x - k is
    // on the current grid: index 2x/step - lo/step = i - (k - lo) * 2^level ... computed below.
    double s = 0.0;
    for (int k = m.lo; k <= m.hi(); ++k) {
      // index of (2x - k) on the step-2^{-level} grid over [lo, hi]
      const Eigen::Index idx = i - static_cast<Eigen::Index>(k - lo) * (Eigen::Index{1} << level);
      if (idx >= 0 && idx < v.size()) s += m.at(k) * v[idx];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace

SampledFunction cascade_values(const WaveletBasis& basis, FnSide side, FnKind kind, int depth) {
  if (depth < 0) throw std::invalid_argument("cascade_values: depth must be >= 0");
  const Mask& m = (side == FnSide::Primal) ? basis.a : basis.a_dual;

  int lo = 0;
  Eigen::VectorXd v = refinement_lattice_values(m, lo);
  SampledFunction scal;
  scal.x0 = lo;
  scal.step = 1.0;

  const int scal_depth = depth - (kind == FnKind::Wavelet ? 1 : 0);
  for (int level = 0; level < std::max(scal_depth, 0); ++level) {
    v = refine_once(v, m, lo, level);
  }
  scal.values = std::move(v);
  scal.step = std::exp2(-std::max(scal_depth, 0));

  if (kind == FnKind::Scaling) return scal;

  // psi(x) = sum_k w_k g(2x - k) with the matching wavelet mask.
  const Mask& w = (side == FnSide::Primal) ? basis.b : basis.b_dual;
  SampledFunction psi;
  const double lo_psi = 0.5 * (w.lo + scal.x0);
  const double hi_psi = 0.5 * (w.hi() + scal.x0 + (scal.size() - 1) * scal.step);
  psi.x0 = lo_psi;
  psi.step = std::exp2(-depth);
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround((hi_psi - lo_psi) / psi.step)) + 1;
  psi.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = lo_psi + static_cast<double>(i) * psi.step;
    double s = 0.0;
    for (int k = w.lo; k <= w.hi(); ++k) s += w.at(k) * scal.at(2.0 * x - k);
    psi.values[i] = s;
  }
  return psi;
}

std::complex<double> scaling_fourier(const Mask& mask, double xi) {
  std::complex<double> prod(1.0, 0.0);
  double arg = xi;
  for (int j = 0; j < 80; ++j) {
    arg *= 0.5;
    if (std::abs(arg) < 1e-12) break;
    std::complex<double> factor(0.0, 0.0);
    for (int k = mask.lo; k <= mask.hi(); ++k)
      factor += mask.at(k) * std::exp(std::complex<double>(0.0, -k * arg));
    prod *= 0.5 * factor;
  }
  return prod;
}

GridFunction synthesize_single_scale_dual(const WaveletBasis& basis, const Eigen::VectorXd& c,
                                          int oversample) {
  if (!is_power_of_two(c.size()))
    throw std::invalid_argument("synthesize_single_scale_dual: length must be a power of two");
  if (oversample < 1) throw std::invalid_argument("synthesize_single_scale_dual: oversample >= 1");
  const int J = std::countr_zero(static_cast<std::uint64_t>(c.size()));
  const int m = 1 << J;
  const int n = 1 << (J + oversample);

  // DFT of the coefficient vector (half spectrum; the rest by conjugation).
  std::vector<double> cin(c.data(), c.data() + m);
  std::vector<fftw_complex> chat(static_cast<std::size_t>(m / 2 + 1));
  std::vector<fftw_complex> spec(static_cast<std::size_t>(n / 2 + 1));
  std::vector<double> vals(static_cast<std::size_t>(n));
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan fwd = fftw_plan_dft_r2c_1d(m, cin.data(), chat.data(), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
  }
  auto chat_at = [&](int r) {
    // DFT value at index r in [0, m), exploiting real-input symmetry
    if (r <= m / 2) return std::complex<double>(chat[static_cast<std::size_t>(r)][0],
                                                chat[static_cast<std::size_t>(r)][1]);
    return std::conj(std::complex<double>(chat[static_cast<std::size_t>(m - r)][0],
                                          chat[static_cast<std::size_t>(m - r)][1]));
  };

  // Fourier coefficients of the periodized expansion: uhat(nu) =
  // 2^{-J/2} phit^(2 pi nu / 2^J) chat(nu mod 2^J); Nyquist dropped.
  const double scale = std::exp2(-0.5 * J);
  for (int nu = 0; nu <= n / 2; ++nu) {
    std::complex<double> v(0.0, 0.0);
    if (nu < n / 2) {
      const double xi = 2.0 * M_PI * nu / m;
      v = scale * scaling_fourier(basis.a_dual, xi) * chat_at(nu % m);
    }
    spec[static_cast<std::size_t>(nu)][0] = v.real();
    spec[static_cast<std::size_t>(nu)][1] = v.imag();
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan bwd = fftw_plan_dft_c2r_1d(n, spec.data(), vals.data(), FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
  }
  GridFunction out;
  out.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), n);
  return out;
}

GridFunction synthesize_dual_expansion(const WaveletBasis& basis, const CoefficientPyramid& p,
                                       int oversample) {
  return synthesize_single_scale_dual(basis, fwt_reconstruct(p, basis), oversample);
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_grid_csv: cannot open " + path.string());
  os << "x,value\n";
  os.precision(17);
  const int n = g.size();
  for (int i = 0; i < n; ++i) os << static_cast<double>(i) / n << "," << g.values[i] << "\n";
}

}  // namespace wpinn
