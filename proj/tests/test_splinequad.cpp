// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/splinequad.hpp"

#include "wpinn/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wpinn;

TEST_CASE("cardinal B-spline point values") {
  CHECK(bspline_eval(2, 0, 1.0) == doctest::Approx(1.0));  // hat peak
  CHECK(bspline_eval(4, 0, 2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(bspline_eval(4, 0, 1.0) == doctest::Approx(1.0 / 6.0));
  CHECK(bspline_eval(4, 0, 3.0) == doctest::Approx(1.0 / 6.0));
  CHECK(bspline_eval(4, 0, -0.5) == 0.0);
  CHECK(bspline_eval(4, 0, 4.0) == 0.0);
}

TEST_CASE("second derivative of the cubic B-spline is continuous piecewise linear") {
  CHECK(std::abs(bspline_eval(4, 2, 0.0)) < 1e-14);
  CHECK(std::abs(bspline_eval(4, 2, 4.0 - 1e-12)) < 1e-9);
  for (double x : {0.3, 0.7, 1.2, 1.9, 2.4, 3.6}) {
    const double mid = bspline_eval(4, 2, x);
    const double lo = bspline_eval(4, 2, x - 0.05);
    const double hi = bspline_eval(4, 2, x + 0.05);
    // linear on each unit cell: midpoint identity holds away from knots
    if (std::floor(x - 0.05) == std::floor(x + 0.05))
      CHECK(mid == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
  }
  for (double k : {1.0, 2.0, 3.0})
    CHECK(bspline_eval(4, 2, k - 1e-9) == doctest::Approx(bspline_eval(4, 2, k + 1e-9)).epsilon(1e-5));
}

TEST_CASE("derivative order validation") {
  CHECK_THROWS_AS(bspline_eval(2, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bspline_eval(4, 4, 0.5), std::invalid_argument);
  CHECK_NOTHROW(bspline_eval(4, 3, 0.45));  // highest order, off knots
}

TEST_CASE("periodized hat at level 0 partitions unity") {
  const WaveletBasis b = make_basis(2, 2);
  PeriodizedFunction phi{b, 0, 0, FnKind::Scaling, FnSide::Primal};
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.77, 0.99})
    CHECK(periodized_eval(phi, x, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("periodized scaling function vanishes outside its wrapped support") {
  const WaveletBasis b = make_basis(2, 2);
  PeriodizedFunction phi{b, 3, 0, FnKind::Scaling, FnSide::Primal};
  CHECK(periodized_eval(phi, 0.5, 0) == 0.0);  // support is [0, 2/8]
  CHECK(periodized_eval(phi, 0.125, 0) > 0.0);
}

TEST_CASE("dual-side pointwise evaluation is rejected") {
  const WaveletBasis b = make_basis(2, 2);
  PeriodizedFunction phit{b, 2, 1, FnKind::Scaling, FnSide::Dual};
  CHECK_THROWS_WITH_AS(periodized_eval(phit, 0.3, 0), doctest::Contains("cascade"),
                       std::invalid_argument);
}

TEST_CASE("integral of a periodized scaling function is 2^{-j/2}") {
  const WaveletBasis b = make_basis(2, 2);
  for (int j : {0, 2, 4}) {
    PeriodizedFunction phi{b, j, (1 << j) / 2, FnKind::Scaling, FnSide::Primal};
    const double v = inner_product([](double) { return 1.0; }, phi, 0, 3);
    CHECK(v == doctest::Approx(std::exp2(-0.5 * j)).epsilon(1e-13));
  }
}

TEST_CASE("inner products: zero integrand, L2 norm of the hat") {
  const WaveletBasis b = make_basis(2, 2);
  PeriodizedFunction phi{b, 4, 7, FnKind::Scaling, FnSide::Primal};
  CHECK(inner_product([](double) { return 0.0; }, phi, 0, 3) == 0.0);

  auto self = [&](double x) { return periodized_eval(phi, x, 0); };
  CHECK(inner_product(self, phi, 0, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("quadrature exactness for cell-aligned piecewise polynomials") {
  const WaveletBasis b = make_basis(4, 4);
  PeriodizedFunction phi{b, 3, 2, FnKind::Scaling, FnSide::Primal};
  // phi^2 is degree 6 per cell; q = 4 Gauss integrates degree 7 exactly
  auto self = [&](double x) { return periodized_eval(phi, x, 0); };
  const double v = inner_product(self, phi, 0, 4);
  // ||N_4||^2_{L2} = 151/315
  CHECK(v == doctest::Approx(151.0 / 315.0).epsilon(1e-13));
}

TEST_CASE("refinement relation holds pointwise after periodization") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto [d, dt] : {std::pair{2, 2}, std::pair{4, 4}}) {
    const WaveletBasis b = make_basis(d, dt);
    const int j = 4;
    const int k = 3;
    PeriodizedFunction coarse{b, j - 1, k, FnKind::Scaling, FnSide::Primal};
    for (int t = 0; t < 250; ++t) {
      const double x = u(rng);
      double rhs = 0.0;
      for (int i = b.a.lo; i <= b.a.hi(); ++i) {
        const int shift = ((2 * k + i) % (1 << j) + (1 << j)) % (1 << j);
        PeriodizedFunction fine{b, j, shift, FnKind::Scaling, FnSide::Primal};
        rhs += b.a.at(i) * M_SQRT1_2 * periodized_eval(fine, x, 0);
      }
      CHECK(periodized_eval(coarse, x, 0) == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("first derivative matches central differences") {
  const WaveletBasis b = make_basis(4, 4);
  PeriodizedFunction phi{b, 3, 5, FnKind::Scaling, FnSide::Primal};
  const double h = 1e-6;
  for (double x : {0.11, 0.33, 0.52, 0.74, 0.96}) {
    const double fd = (periodized_eval(phi, x + h, 0) - periodized_eval(phi, x - h, 0)) / (2 * h);
    CHECK(periodized_eval(phi, x, 1) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("wavelet evaluation agrees with its mask expansion") {
  const WaveletBasis b = make_basis(2, 2);
  PeriodizedFunction psi{b, 3, 1, FnKind::Wavelet, FnSide::Primal};
  for (double x : {0.05, 0.21, 0.40, 0.63, 0.88}) {
    double expect = 0.0;
    for (int m = -3; m <= 3; ++m) {
      const double t = std::exp2(3) * (x - m) - 1;
      for (int i = b.b.lo; i <= b.b.hi(); ++i)
        expect += std::exp2(1.5) * b.b.at(i) * bspline_eval(2, 0, 2 * t - i);
    }
    CHECK(periodized_eval(psi, x, 0) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("single-scale coefficients: zero map and Gram row reproduction") {
  const WaveletBasis b = make_basis(2, 2);
  CHECK(single_scale_coeffs([](double) { return 0.0; }, 5, b).lpNorm<Eigen::Infinity>() == 0.0);

  const int J = 3;
  PeriodizedFunction g{b, J, 0, FnKind::Scaling, FnSide::Primal};
  auto gfun = [&](double x) { return periodized_eval(g, x, 0); };
  const Eigen::VectorXd c = single_scale_coeffs(gfun, J, b, 3);
  for (int k = 0; k < (1 << J); ++k) {
    PeriodizedFunction pk{b, J, k, FnKind::Scaling, FnSide::Primal};
    CHECK(c[k] == doctest::Approx(inner_product(gfun, pk, 0, 3)).epsilon(1e-13));
  }
  // hat Gram row: diagonal 2/3, neighbors 1/6, zero further out
  CHECK(c[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(c[(1 << J) - 1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(c[4]) < 1e-14);
}

TEST_CASE("single-scale projection converges at the dual approximation order") {
  const WaveletBasis b = make_basis(2, 2);
  auto g = [](double x) { return std::cos(2.0 * M_PI * x); };
  std::vector<double> errs, js;
  for (int J = 4; J <= 10; ++J) {
    const Eigen::VectorXd c = single_scale_coeffs(g, J, b, 3);
    const GridFunction rec = synthesize_single_scale_dual(b, c, 4);
    GridFunction diff = rec;
    const int n = rec.size();
    for (int i = 0; i < n; ++i) diff.values[i] -= g(static_cast<double>(i) / n);
    errs.push_back(sobolev_norm(diff, 0.0));
    js.push_back(J);
  }
  // least-squares slope of log2(err) against J; Jackson rate for dt = 2 is -2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(errs.size());
  for (std::size_t i = 0; i < errs.size(); ++i) {
    const double y = std::log2(errs[i]);
    sx += js[i];
    sy += y;
    sxx += js[i] * js[i];
    sxy += js[i] * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.2));
}

TEST_CASE("quadrature mesh splits cells at breakpoints") {
  const double kink = 1.0 / 3.0;
  const QuadMesh mesh = QuadMesh::dyadic(2, 3, std::vector<double>{kink});
  CHECK(mesh.panel_count() == 5);  // 4 cells, one split
  double wsum = 0.0;
  for (double w : mesh.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (double x : mesh.nodes) CHECK(std::abs(x - kink) > 1e-6);
}
