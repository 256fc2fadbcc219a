// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/splinequad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpinn {

namespace {

// Order-d cardinal B-spline N_d with support [0, d]; right-continuous at
// the knots.
double bspline_value(int d, double x) {
  const int cell = static_cast<int>(std::floor(x));
  if (cell < 0 || cell >= d) return 0.0;
  if (d == 1) return 1.0;
  // Cox-de Boor on the triangular scheme over order-1 indicators.
  std::vector<double> v(static_cast<std::size_t>(d), 0.0);
  v[static_cast<std::size_t>(cell)] = 1.0;
  for (int ord = 2; ord <= d; ++ord) {
    for (int i = 0; i <= d - ord; ++i) {
      const double left = (x - i) / (ord - 1) * v[static_cast<std::size_t>(i)];
      const double right = (i + ord - x) / (ord - 1) * v[static_cast<std::size_t>(i + 1)];
      v[static_cast<std::size_t>(i)] = left + right;
    }
  }
  return v[0];
}

}  // namespace

double bspline_eval(int d, int r, double x) {
  if (d < 1) throw std::invalid_argument("bspline_eval: order must be >= 1");
  if (r < 0 || r >= d)
    throw std::invalid_argument("bspline_eval: derivative order " + std::to_string(r) +
                                " not available for spline order " + std::to_string(d));
  if (r == 0) return bspline_value(d, x);
  // N_d^(r)(x) = sum_i (-1)^i binom(r,i) N_{d-r}(x - i)
  double s = 0.0;
  double c = 1.0;
  for (int i = 0; i <= r; ++i) {
    s += c * bspline_value(d - r, x - i);
    c *= -static_cast<double>(r - i) / static_cast<double>(i + 1);
  }
  return s;
}

std::pair<double, double> PeriodizedFunction::base_support() const {
  const int d = basis.d;
  if (kind == FnKind::Scaling) {
    if (side == FnSide::Primal) return {0.0, static_cast<double>(d)};
    return {static_cast<double>(basis.a_dual.lo), static_cast<double>(basis.a_dual.hi())};
  }
  // psi = sum_k b_k phi(2x - k): supp = [(b.lo + phi.lo)/2, (b.hi + phi.hi)/2]
  if (side == FnSide::Primal)
    return {0.5 * basis.b.lo, 0.5 * (basis.b.hi() + d)};
  return {0.5 * (basis.b_dual.lo + basis.a_dual.lo), 0.5 * (basis.b_dual.hi() + basis.a_dual.hi())};
}

double periodized_eval(const PeriodizedFunction& f, double x, int deriv) {
  if (f.side == FnSide::Dual)
    throw std::invalid_argument(
        "periodized_eval: dual functions have no pointwise form; use cascade_values");
  if (f.level < 0 || f.shift < 0 || f.shift >= (1 << f.level))
    throw std::invalid_argument("periodized_eval: bad (level, shift)");

  const int d = f.basis.d;
  const double scale = std::exp2(static_cast<double>(f.level) * (0.5 + deriv));
  const auto [lo, hi] = f.base_support();

  // g_{j,k}(x) = 2^{j(1/2+r)} sum_m g^{(r)}(2^j (x - m) - k); only translates
  // with 2^j(x-m)-k inside [lo, hi] contribute.
  const double t0 = std::exp2(f.level) * x - f.shift;
  const int m_min = static_cast<int>(std::ceil((t0 - hi) / std::exp2(f.level)));
  const int m_max = static_cast<int>(std::floor((t0 - lo) / std::exp2(f.level)));
  double s = 0.0;
  for (int m = m_min; m <= m_max; ++m) {
    const double t = t0 - std::exp2(f.level) * m;
    if (f.kind == FnKind::Scaling) {
      s += bspline_eval(d, deriv, t);
    } else {
      const Mask& b = f.basis.b;
      const double two_r = std::exp2(deriv);
      for (int i = 0; i < b.size(); ++i)
        s += two_r * b.w[static_cast<std::size_t>(i)] * bspline_eval(d, deriv, 2.0 * t - (b.lo + i));
    }
  }
  return scale * s;
}

void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: q must be >= 1");
  nodes.assign(static_cast<std::size_t>(q), 0.0);
  weights.assign(static_cast<std::size_t>(q), 0.0);
  for (int i = 0; i < q; ++i) {
    // Chebyshev initial guess, Newton on P_q.
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (q == 1) p1 = x;
      for (int n = 2; n <= q; ++n) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      const double p = (q == 1) ? x : p1;
      const double pm1 = (q == 1) ? 1.0 : p0;
      dp = q * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(nodes.begin(), nodes.end());
  std::reverse(weights.begin(), weights.end());
}

QuadMesh QuadMesh::dyadic(int level, int q, std::span<const double> splits) {
  if (level < 0) throw std::invalid_argument("QuadMesh: level must be >= 0");
  QuadMesh mesh;
  mesh.level = level;
  mesh.points_per_panel = q;
  std::vector<double> gn, gw;
  gauss_legendre(q, gn, gw);

  const int cells = 1 << level;
  const double h = 1.0 / cells;
  std::vector<double> cuts;
  for (int c = 0; c < cells; ++c) {
    const double a = c * h;
    const double b = a + h;
    cuts.clear();
    cuts.push_back(a);
    for (double s : splits)
      if (s > a + 1e-14 && s < b - 1e-14) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double pa = cuts[p], pb = cuts[p + 1];
      mesh.panels.emplace_back(pa, pb);
      mesh.panel_cell.push_back(c);
      const double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
      for (int i = 0; i < q; ++i) {
        mesh.nodes.push_back(mid + half * gn[static_cast<std::size_t>(i)]);
        mesh.weights.push_back(half * gw[static_cast<std::size_t>(i)]);
      }
    }
  }
  return mesh;
}

double inner_product(const std::function<double(double)>& g, const PeriodizedFunction& f,
                     int deriv, int q) {
  if (q < 1) throw std::invalid_argument("inner_product: q must be >= 1");
  const int jq = f.piecewise_level();
  const auto [lo, hi] = f.base_support();
  const double cell_w = std::exp2(-jq);
  const int n_cells = 1 << jq;

  // Support in unwrapped [0,1)-scale coordinates; when it spans the whole
  // period just integrate every cell once.
  const double start = (lo + f.shift) * std::exp2(-f.level);
  const double end = (hi + f.shift) * std::exp2(-f.level);
  int c_first = static_cast<int>(std::floor(start / cell_w));
  int c_last = static_cast<int>(std::ceil(end / cell_w)) - 1;
  if (c_last - c_first + 1 >= n_cells) {
    c_first = 0;
    c_last = n_cells - 1;
  }

  std::vector<double> gn, gw;
  gauss_legendre(q, gn, gw);

  double s = 0.0;
  for (int c = c_first; c <= c_last; ++c) {
    const double half = 0.5 * cell_w, mid = c * cell_w + half;
    for (int i = 0; i < q; ++i) {
      const double x = mid + half * gn[static_cast<std::size_t>(i)];
      const double xw = x - std::floor(x);  // wrap into [0,1)
      s += half * gw[static_cast<std::size_t>(i)] * g(xw) * periodized_eval(f, xw, deriv);
    }
  }
  return s;
}

Eigen::VectorXd single_scale_coeffs(const std::function<double(double)>& g, int level,
                                    const WaveletBasis& basis, int q) {
  if (level < 0) throw std::invalid_argument("single_scale_coeffs: level must be >= 0");
  const int n = 1 << level;
  const int d = basis.d;
  std::vector<double> gn, gw;
  gauss_legendre(q, gn, gw);

  // Sample g once at all composite nodes.
  const double h = std::exp2(-level);
  Eigen::MatrixXd gs(q, n);
  for (int c = 0; c < n; ++c) {
    const double half = 0.5 * h, mid = c * h + half;
    for (int i = 0; i < q; ++i) gs(i, c) = g(mid + half * gn[static_cast<std::size_t>(i)]);
  }

  // Translation-invariant pattern: phi_{J,k} on cell k+o at node i equals
  // 2^{J/2} N_d(o + (1+gn_i)/2).
  Eigen::MatrixXd pat(q, d);
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < q; ++i)
      pat(i, o) = bspline_eval(d, 0, o + 0.5 * (1.0 + gn[static_cast<std::size_t>(i)]));

  const double scale = std::exp2(0.5 * level) * 0.5 * h;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  // At coarse levels the support wraps multiple times; cap the overlap at
  // one full period per coefficient.
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    if (d <= n) {
      for (int o = 0; o < d; ++o) {
        const int cell = (k + o) % n;
        for (int i = 0; i < q; ++i)
          s += gw[static_cast<std::size_t>(i)] * gs(i, cell) * pat(i, o);
      }
    } else {
      // Accumulate the wrapped pattern per cell first.
      for (int cell = 0; cell < n; ++cell) {
        for (int i = 0; i < q; ++i) {
          double pw = 0.0;
          for (int o = cell - k; o < d; o += n)
            if (o >= 0) pw += pat(i, o);
          s += gw[static_cast<std::size_t>(i)] * gs(i, cell) * pw;
        }
      }
    }
    c[k] = scale * s;
  }
  return c;
}

}  // namespace wpinn
