// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/formulations.hpp"

#include "wpinn/spectral.hpp"

#include <Eigen/Dense>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wpinn;

namespace {

Architecture tiny(int inputs) {
  Architecture a;
  a.widths = {inputs, 8, 8, 1};
  return a;
}

// Periodic cubic-spline interpolant of f at the level-J knots: solves the
// circulant system with stencil (1/6, 2/3, 1/6). Test-local oracle.
Eigen::VectorXd cubic_interpolant(const std::function<double(double)>& f, int J) {
  const int n = 1 << J;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  const double scale = std::exp2(0.5 * J);  // phi_{J,k}(x_m) = 2^{J/2} N_4(m - k + 2)
  for (int m = 0; m < n; ++m) {
    rhs[m] = f(static_cast<double>(m) / n);
    M(m, m) = scale * (2.0 / 3.0);
    M(m, (m + 1) % n) = scale * (1.0 / 6.0);
    M(m, (m + n - 1) % n) = scale * (1.0 / 6.0);
  }
  return M.partialPivLu().solve(rhs);
}

double spline_eval(const WaveletBasis& basis, const Eigen::VectorXd& c, double x, int deriv) {
  const int J = static_cast<int>(std::round(std::log2(c.size())));
  double s = 0.0;
  for (int k = 0; k < c.size(); ++k) {
    PeriodizedFunction phi{basis, J, k, FnKind::Scaling, FnSide::Primal};
    s += c[k] * periodized_eval(phi, x, deriv);
  }
  return s;
}

}  // namespace

TEST_CASE("classical residual of the zero network is the forcing term") {
  const ProblemSpec p1 = make_problem("problem1");
  const Architecture arch = tiny(1);
  const Params zero = Params::zeros(arch);
  CHECK(classical_residual(p1, arch, zero, 0.0, {}) ==
        doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-12));
  CHECK(std::abs(classical_residual(p1, arch, zero, 0.25, {})) < 1e-12);
}

TEST_CASE("classical residual agrees with finite differences of the forward pass") {
  const ProblemSpec p2 = make_problem("problem2");
  const Architecture arch = tiny(3);
  const Params theta = init_params(arch, 11);
  const std::vector<double> mu{1.4, 0.6};
  const double h = 1e-5;
  for (double x : {0.11, 0.42, 0.73}) {
    auto f = [&](double t) { return forward(arch, theta, std::vector<double>{t, mu[0], mu[1]}); };
    const double ux = (f(x + h) - f(x - h)) / (2 * h);
    const double uxx = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    const double expect =
        p2.rhs(x) + p2.A(x, mu) * uxx + p2.A_slope(x, mu) * ux - f(x);
    CHECK(classical_residual(p2, arch, theta, x, mu) == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("boundary residual of simple nets") {
  const ProblemSpec p1 = make_problem("problem1");
  Architecture affine;
  affine.widths = {1, 1};
  Params ramp = Params::zeros(affine);
  ramp.W[0] << 1.0;  // net(x) = x
  const auto r = boundary_residual(p1, affine, ramp, {});
  CHECK(r[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(r[1]) < 1e-15);

  Params constant = Params::zeros(affine);
  constant.b[0] << 2.5;  // periodic by construction
  const auto rc = boundary_residual(p1, affine, constant, {});
  CHECK(rc[0] == 0.0);
  CHECK(rc[1] == 0.0);
}

TEST_CASE("weak residual of the zero network reproduces (f, test)") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis basis = make_basis(2, 2);
  const Architecture arch = tiny(1);
  const Params zero = Params::zeros(arch);
  for (int k : {0, 3, 7}) {
    PeriodizedFunction phi{basis, 3, k, FnKind::Scaling, FnSide::Primal};
    const double expect = inner_product(p1.rhs, phi, 0, 3);
    CHECK(weak_tested_residual(p1, arch, zero, {}, phi, 3) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("weak residual is linear in the test function via the two-scale relation") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis basis = make_basis(2, 2);
  const Architecture arch = tiny(1);
  const Params theta = init_params(arch, 3);
  const int j = 3, k = 2;
  PeriodizedFunction psi{basis, j, k, FnKind::Wavelet, FnSide::Primal};
  const double lhs = weak_tested_residual(p1, arch, theta, {}, psi, 6);
  // psi_{j,k} = 2^{-1/2} sum_m b_m phi_{j+1, 2k+m}
  double rhs = 0.0;
  for (int m = basis.b.lo; m <= basis.b.hi(); ++m) {
    const int shift = ((2 * k + m) % (1 << (j + 1)) + (1 << (j + 1))) % (1 << (j + 1));
    PeriodizedFunction phi{basis, j + 1, shift, FnKind::Scaling, FnSide::Primal};
    rhs += M_SQRT1_2 * basis.b.at(m) * weak_tested_residual(p1, arch, theta, {}, phi, 6);
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("adjoint application: smoothness guard and pointwise identity") {
  const ProblemSpec p2 = make_problem("problem2");
  const WaveletBasis b22 = make_basis(2, 2);
  const WaveletBasis b44 = make_basis(4, 4);
  PeriodizedFunction hat{b22, 3, 1, FnKind::Scaling, FnSide::Primal};
  CHECK_THROWS_AS(apply_adjoint(p2, {1.0, 1.0}, hat, 0.2), std::invalid_argument);

  PeriodizedFunction phi{b44, 4, 5, FnKind::Scaling, FnSide::Primal};
  const std::vector<double> mu{1.0, 1.0};  // A == 1: B* v = -v'' + v
  const double h = 1e-5;
  // sample points off the knot lattice (the third derivative jumps there)
  for (double x : {0.33, 0.42, 0.47}) {
    const double v0 = periodized_eval(phi, x, 0);
    const double vxx_fd =
        (periodized_eval(phi, x + h, 0) - 2 * v0 + periodized_eval(phi, x - h, 0)) / (h * h);
    CHECK(apply_adjoint(p2, mu, phi, x) == doctest::Approx(-vxx_fd + v0).epsilon(1e-4));
  }
}

TEST_CASE("adjoint of a spline interpolant converges to the test norm of the cosine") {
  // ||| v |||: for the Poisson form, ||B* v||_{L2} -> ||cos''||_{L2} = 4 pi^2 / sqrt(2)
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const double target = 4.0 * M_PI * M_PI / std::sqrt(2.0);
  double prev_gap = 1e300;
  for (int J : {4, 5, 6}) {
    const Eigen::VectorXd c =
        cubic_interpolant([](double x) { return std::cos(2.0 * M_PI * x); }, J);
    const QuadMesh mesh = QuadMesh::dyadic(J, 4);
    double norm2 = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double x = mesh.nodes[static_cast<std::size_t>(i)];
      double bstar = 0.0;
      for (int k = 0; k < c.size(); ++k) {
        PeriodizedFunction phi{b44, J, k, FnKind::Scaling, FnSide::Primal};
        bstar += c[k] * apply_adjoint(p1, {}, phi, x);
      }
      norm2 += mesh.weights[static_cast<std::size_t>(i)] * bstar * bstar;
    }
    const double gap = std::abs(std::sqrt(norm2) - target);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05);
  CHECK(target == doctest::Approx(27.92).epsilon(1e-3));
}

TEST_CASE("ultra-weak coefficients of the zero network reduce to (f, phi)") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const Architecture arch = tiny(1);
  const Params zero = Params::zeros(arch);
  for (int k : {0, 5, 12}) {
    PeriodizedFunction phi{b44, 4, k, FnKind::Scaling, FnSide::Primal};
    const double expect = inner_product(p1.rhs, phi, 0, 3);
    CHECK(ultraweak_coeff(p1, arch, zero, {}, b44, 4, k, 3) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("integration by parts: ultra-weak and weak-tested residuals agree") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const Architecture arch = tiny(1);
  const Params theta = init_params(arch, 19);
  // same high-order rule on both sides: the identity is exact up to quadrature
  for (int J : {4, 5, 6}) {
    for (int k : {1, (1 << J) / 2}) {
      PeriodizedFunction phi{b44, J, k, FnKind::Scaling, FnSide::Primal};
      const double weak = weak_tested_residual(p1, arch, theta, {}, phi, 6);
      const double uw = ultraweak_coeff(p1, arch, theta, {}, b44, J, k, 6);
      CHECK(uw == doctest::Approx(weak).epsilon(1e-8));
    }
  }
  // default rule at the largest level from the invariant
  PeriodizedFunction phi{b44, 8, 40, FnKind::Scaling, FnSide::Primal};
  const double weak = weak_tested_residual(p1, arch, theta, {}, phi, 3);
  const double uw = ultraweak_coeff(p1, arch, theta, {}, b44, 8, 40, 3);
  CHECK(uw == doctest::Approx(weak).epsilon(1e-6));
}

TEST_CASE("the diffusion-reaction operator is self-adjoint in the L2 pairing") {
  const ProblemSpec p2 = make_problem("problem2");
  const WaveletBasis b44 = make_basis(4, 4);
  const std::vector<double> mu{1.8, 0.25};
  const int J = 4;
  const QuadMesh mesh = QuadMesh::dyadic(J + 1, 5, p2.kinks());
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> pick(0, (1 << J) - 1);
  for (int t = 0; t < 6; ++t) {
    const int ku = pick(rng), kv = pick(rng);
    PeriodizedFunction u{b44, J, ku, FnKind::Scaling, FnSide::Primal};
    PeriodizedFunction v{b44, J, kv, FnKind::Scaling, FnSide::Primal};
    double buv = 0.0, ubv = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double x = mesh.nodes[static_cast<std::size_t>(i)];
      const double w = mesh.weights[static_cast<std::size_t>(i)];
      buv += w * apply_adjoint(p2, mu, u, x) * periodized_eval(v, x, 0);
      ubv += w * periodized_eval(u, x, 0) * apply_adjoint(p2, mu, v, x);
    }
    const double scale = std::max({1.0, std::abs(buv), std::abs(ubv)});
    CHECK(std::abs(buv - ubv) / scale < 1e-8);
  }
}

TEST_CASE("coercivity witness and test-norm sandwich on random splines") {
  const ProblemSpec p2 = make_problem("problem2");
  const WaveletBasis b44 = make_basis(4, 4);
  const int J = 4;
  std::mt19937 rng(43);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> ubox(0.125, 2.0);
  for (int t = 0; t < 8; ++t) {
    const std::vector<double> mu{ubox(rng), ubox(rng)};
    Eigen::VectorXd c(1 << J);
    for (auto& x : c.reshaped()) x = n01(rng);

    // sample v on a fine grid for the spectral norms
    const int n = 1 << 11;
    GridFunction vg, vgd;
    vg.values.resize(n);
    for (int i = 0; i < n; ++i) vg.values[i] = spline_eval(b44, c, static_cast<double>(i) / n, 0);

    const QuadMesh mesh = QuadMesh::dyadic(J + 1, 5, p2.kinks());
    double bvv = 0.0, bstar2 = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double x = mesh.nodes[static_cast<std::size_t>(i)];
      const double w = mesh.weights[static_cast<std::size_t>(i)];
      const double v0 = spline_eval(b44, c, x, 0);
      const double v1 = spline_eval(b44, c, x, 1);
      double bs = 0.0;
      for (int k = 0; k < c.size(); ++k) {
        PeriodizedFunction phi{b44, J, k, FnKind::Scaling, FnSide::Primal};
        bs += c[k] * apply_adjoint(p2, mu, phi, x);
      }
      bvv += w * (p2.A(x, mu) * v1 * v1 + v0 * v0);
      bstar2 += w * bs * bs;
    }

    const double alpha = p2.alpha(mu);
    const double h1 = sobolev_norm(vg, 1.0);
    CHECK(bvv >= alpha * h1 * h1 * (1.0 - 1e-6));

    const double h2 = sobolev_norm(vg, 2.0);
    const double cmu = p2.continuity(mu);
    CHECK(std::sqrt(bstar2) >= alpha * h2 * (1.0 - 1e-6));
    CHECK(std::sqrt(bstar2) <= cmu * h2 * (1.0 + 1e-6));
  }
}

TEST_CASE("residual assembler matches the per-coefficient operations") {
  const ProblemSpec p2 = make_problem("problem2");
  const WaveletBasis b22 = make_basis(2, 2);
  const WaveletBasis b44 = make_basis(4, 4);
  const std::vector<double> mu{0.4, 1.6};
  const int J = 4;
  const Architecture arch = tiny(3);
  const Params theta = init_params(arch, 53);

  SUBCASE("weak") {
    const ResidualAssembler as(p2, Formulation::Weak, b22, J, mu, 3);
    const int n = as.mesh().node_count();
    Eigen::MatrixXd Z(3, n);
    for (int i = 0; i < n; ++i) {
      Z(0, i) = as.mesh().nodes[static_cast<std::size_t>(i)];
      Z(1, i) = mu[0];
      Z(2, i) = mu[1];
    }
    const JetBatch jets = forward_jet_batch(arch, theta, Z, 1);
    const Eigen::VectorXd c = as.assemble(jets.u, &jets.ux);
    for (int k = 0; k < as.coeff_count(); k += 3) {
      PeriodizedFunction phi{b22, J, k, FnKind::Scaling, FnSide::Primal};
      CHECK(c[k] == doctest::Approx(weak_tested_residual(p2, arch, theta, mu, phi, 3)).epsilon(1e-11));
    }
  }
  SUBCASE("ultra-weak") {
    const ResidualAssembler as(p2, Formulation::UltraWeak, b44, J, mu, 3);
    const int n = as.mesh().node_count();
    Eigen::MatrixXd Z(3, n);
    for (int i = 0; i < n; ++i) {
      Z(0, i) = as.mesh().nodes[static_cast<std::size_t>(i)];
      Z(1, i) = mu[0];
      Z(2, i) = mu[1];
    }
    const JetBatch jets = forward_jet_batch(arch, theta, Z, 0);
    const Eigen::VectorXd c = as.assemble(jets.u, nullptr);
    for (int k = 0; k < as.coeff_count(); k += 3) {
      CHECK(c[k] ==
            doctest::Approx(ultraweak_coeff(p2, arch, theta, mu, b44, J, k, 3)).epsilon(1e-11));
    }
  }
}

TEST_CASE("assembler adjoint is the transpose of its linear part") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const ResidualAssembler as(p1, Formulation::UltraWeak, b44, 4, {}, 3);
  const int n = as.mesh().node_count();
  std::mt19937 rng(61);
  std::normal_distribution<double> n01;
  Eigen::VectorXd u(n), du(n), cbar(as.coeff_count());
  for (auto& x : u.reshaped()) x = n01(rng);
  for (auto& x : du.reshaped()) x = n01(rng);
  for (auto& x : cbar.reshaped()) x = n01(rng);

  const Eigen::VectorXd c0 = as.assemble(u, nullptr);
  const Eigen::VectorXd c1 = as.assemble(u + du, nullptr);
  Eigen::VectorXd ubar;
  as.adjoint(cbar, ubar, nullptr);
  CHECK(cbar.dot(c1 - c0) == doctest::Approx(ubar.dot(du)).epsilon(1e-10));
}
