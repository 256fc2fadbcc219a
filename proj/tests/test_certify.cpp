// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/certify.hpp"

#include "wpinn/loss.hpp"
#include "wpinn/training.hpp"

#include <Eigen/Dense>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

using namespace wpinn;

namespace {

Architecture tiny(int inputs) {
  Architecture a;
  a.widths = {inputs, 16, 16, 1};
  return a;
}

}  // namespace

TEST_CASE("certifier validates its constants") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b22 = make_basis(2, 2);
  const Architecture arch = tiny(1);

  NormEquivalence bad;
  bad.c_low = 0.0;
  bad.C_up = 1.0;
  bad.sigma = -1.0;
  bad.level = 8;
  CHECK_THROWS_AS(Certifier(p1, arch, Formulation::Weak, b22, 4, bad), std::invalid_argument);

  NormEquivalence wrong_sigma;
  wrong_sigma.c_low = 0.1;
  wrong_sigma.C_up = 1.0;
  wrong_sigma.sigma = -2.0;  // ultra-weak constants offered to a weak certifier
  wrong_sigma.level = 8;
  CHECK_THROWS_AS(Certifier(p1, arch, Formulation::Weak, b22, 4, wrong_sigma),
                  std::invalid_argument);

  NormEquivalence shallow;
  shallow.c_low = 0.1;
  shallow.C_up = 1.0;
  shallow.sigma = -1.0;
  shallow.level = 3;  // certified only below the requested level
  CHECK_THROWS_AS(Certifier(p1, arch, Formulation::Weak, b22, 4, shallow), std::invalid_argument);
}

TEST_CASE("error bound assembles (1/alpha) sqrt(C_up * weighted sum)") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const Architecture arch = tiny(1);
  const Params zero = Params::zeros(arch);
  const NormEquivalence ne = estimate_norm_constants(b44, -2.0, 6);

  const Certifier cert(p1, arch, Formulation::UltraWeak, b44, 6, ne);
  const CoefficientPyramid pyr = cert.residual_pyramid(zero, {});
  const double S = weighted_sobolev_sum(pyr, 2.0);
  const double expect = std::sqrt(ne.C_up * S) / p1.alpha({});
  CHECK(cert.error_bound(zero, {}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("parametric bound scales with one over alpha") {
  const ProblemSpec p2 = make_problem("problem2");
  CHECK(p2.alpha({0.125, 2.0}) == doctest::Approx(0.125));
  const WaveletBasis b22 = make_basis(2, 2);
  const Architecture arch = tiny(3);
  const Params theta = init_params(arch, 17);
  const NormEquivalence ne = estimate_norm_constants(b22, -1.0, 5);
  const Certifier cert(p2, arch, Formulation::Weak, b22, 5, ne);

  const std::vector<double> mu{0.125, 2.0};
  const double S = weighted_sobolev_sum(cert.residual_pyramid(theta, mu), 1.0);
  CHECK(cert.error_bound(theta, mu) == doctest::Approx(8.0 * std::sqrt(ne.C_up * S)).epsilon(1e-13));
}

TEST_CASE("effectivity handles zero true error and the C_up scaling") {
  CHECK(std::isinf(effectivity(0.5, 0.0)));
  CHECK(effectivity(2.0, 1.0) == doctest::Approx(2.0));

  // scaled vs unscaled estimator differ exactly by sqrt(C_up)
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b22 = make_basis(2, 2);
  const Architecture arch = tiny(1);
  const Params theta = init_params(arch, 29);
  NormEquivalence ne = estimate_norm_constants(b22, -1.0, 5);
  const Certifier scaled(p1, arch, Formulation::Weak, b22, 5, ne);
  NormEquivalence unscaled = ne;
  unscaled.C_up = 1.0;
  unscaled.c_low = std::min(ne.c_low, 1.0);
  const Certifier plain(p1, arch, Formulation::Weak, b22, 5, unscaled);
  CHECK(scaled.error_bound(theta, {}) ==
        doctest::Approx(std::sqrt(ne.C_up) * plain.error_bound(theta, {})).epsilon(1e-13));
}

TEST_CASE("truncation never inflates the bound") {
  const ProblemSpec p1 = make_problem("problem1");
  const WaveletBasis b44 = make_basis(4, 4);
  const Architecture arch = tiny(1);
  const Params theta = init_params(arch, 31);
  const NormEquivalence ne = estimate_norm_constants(b44, -2.0, 6);
  const Certifier cert(p1, arch, Formulation::UltraWeak, b44, 6, ne);

  const CoefficientPyramid pyr = cert.residual_pyramid(theta, {});
  const double eta = std::sqrt(ne.C_up * weighted_sobolev_sum(pyr, 2.0)) / p1.alpha({});
  for (double tol : {1e-6, 1e-3}) {
    const CoefficientPyramid t = adaptive_truncate(pyr, 2.0, tol);
    const double eta_t = std::sqrt(ne.C_up * weighted_sobolev_sum(t, 2.0)) / p1.alpha({});
    CHECK(eta_t <= eta + 1e-15);
  }
}

TEST_CASE("bound stabilizes in the level for a trained network") {
  // train a small mse network so the residual is smooth and small
  const ProblemSpec p1 = make_problem("problem1");
  const Architecture arch = tiny(1);
  LossConfig cfg;
  cfg.kind = LossKind::Mse;
  cfg.level = 5;
  const LossFunction loss(p1, arch, cfg);
  TrainConfig tc;
  tc.restarts = 1;
  tc.max_iters = 120;
  tc.seeds = {5};
  const auto res = train(loss, tc);
  REQUIRE(!res[0].failed);

  const WaveletBasis b22 = make_basis(2, 2);
  const NormEquivalence ne = estimate_norm_constants(b22, -1.0, 10);
  std::vector<double> etas;
  for (int J : {8, 10}) {
    const Certifier cert(p1, arch, Formulation::Weak, b22, J, ne);
    etas.push_back(cert.error_bound(res[0].theta, {}));
  }
  CHECK(std::abs(etas[1] - etas[0]) / etas[0] < 0.10);
}

TEST_CASE("ultra-weak error-residual identity against a Fourier-section oracle") {
  // The L2 error of any network equals the (Y_mu)'-dual norm of its residual
  // functional. The oracle computes that dual norm independently: residual
  // Fourier coefficients by quadrature, the test-norm Gram by a finite
  // section of the operator symbol, then rhat^H (T T^H)^{-1} rhat.
  const ProblemSpec p2 = make_problem("problem2");
  Architecture arch;
  arch.widths = {3, 24, 24, 1};
  const WaveletBasis b44 = make_basis(4, 4);
  const std::vector<std::vector<double>> mus = {{0.25, 1.5}, {1.0, 1.0}, {1.75, 0.5}};

  LossConfig cfg;
  cfg.kind = LossKind::WaveletUltraWeak;
  cfg.level = 5;
  cfg.basis = b44;
  cfg.mu_samples = mus;
  const LossFunction loss(p2, arch, cfg);
  TrainConfig tc;
  tc.restarts = 1;
  tc.max_iters = 150;
  tc.seeds = {42};
  const auto rs = train(loss, tc);
  REQUIRE(!rs[0].failed);
  const Params& th = rs[0].theta;

  const int K = 64;
  const int n = 1 << 11;
  Eigen::MatrixXd Z(3, n);
  for (int i = 0; i < n; ++i) Z(0, i) = static_cast<double>(i) / n;
  const QuadMesh mesh = QuadMesh::dyadic(5, 3, p2.kinks());

  for (const auto& mu : mus) {
    for (int i = 0; i < n; ++i) {
      Z(1, i) = mu[0];
      Z(2, i) = mu[1];
    }
    const JetBatch jets = forward_jet_batch(arch, th, Z, 0);
    using Cx = std::complex<double>;
    Eigen::VectorXcd rhat(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
      Cx acc(0, 0);
      for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const Cx ek = std::exp(Cx(0, 2 * M_PI * k * x));
        const Cx bstar = (4 * M_PI * M_PI * k * k * p2.A(x, mu) + 1.0) * ek -
                         Cx(0, 2 * M_PI * k) * p2.A_slope(x, mu) * ek;
        acc += (p2.rhs(x) * std::conj(ek) - jets.u[i] * std::conj(bstar)) / static_cast<double>(n);
      }
      rhat[k + K] = acc;
    }
    Eigen::VectorXcd Ahat(4 * K + 1), Aphat(4 * K + 1);
    for (int q = -2 * K; q <= 2 * K; ++q) {
      Cx a(0, 0), ap(0, 0);
      const int m2 = 1 << 12;
      for (int i = 0; i < m2; ++i) {
        const double x = (i + 0.5) / m2;
        const Cx w = std::exp(Cx(0, -2 * M_PI * q * x)) / static_cast<double>(m2);
        a += p2.A(x, mu) * w;
        ap += p2.A_slope(x, mu) * w;
      }
      Ahat[q + 2 * K] = a;
      Aphat[q + 2 * K] = ap;
    }
    Eigen::MatrixXcd T(2 * K + 1, 2 * K + 1);
    for (int l = -K; l <= K; ++l)
      for (int m = -K; m <= K; ++m) {
        Cx v = (4 * M_PI * M_PI * m * m) * Ahat[(l - m) + 2 * K] -
               Cx(0, 2 * M_PI * m) * Aphat[(l - m) + 2 * K];
        if (l == m) v += 1.0;
        T(l + K, m + K) = v;
      }
    const Eigen::MatrixXcd G = T * T.adjoint();
    const Eigen::VectorXcd sol = G.ldlt().solve(rhat);
    const double predicted = std::sqrt(std::real(rhat.dot(sol)));

    const TruthFn truth = truth_from_grid(fem_reference(p2, mu, 1 << 13));
    const double measured = solution_error(arch, th, truth, mu, mesh, ErrorNorm::L2, false);
    CHECK(measured == doctest::Approx(predicted).epsilon(0.05));
  }
}

TEST_CASE("certificate csv layout") {
  const auto dir = std::filesystem::temp_directory_path() / "wpinn_test";
  std::filesystem::create_directories(dir);
  CertificateRow row;
  row.mu = {0.5, 1.5};
  row.eta = 0.25;
  row.error = 0.1;
  row.effectivity = 2.5;
  row.level = 6;
  row.alpha = 0.5;
  row.C_up = 1.0;
  write_certificate_csv(dir / "cert.csv", 2, {row}, {"wpinn test"});
  std::ifstream is(dir / "cert.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "# wpinn test");
  std::getline(is, line);
  CHECK(line == "mu1,mu2,eta,error_if_truth,effectivity,J,alpha,C_up");
}
