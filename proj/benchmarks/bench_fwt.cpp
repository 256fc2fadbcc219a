// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/wavelet.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

Eigen::VectorXd random_vector(Eigen::Index n) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (auto& x : v.reshaped()) x = u(rng);
  return v;
}

void BM_FwtDecompose(benchmark::State& state) {
  const auto basis = wpinn::make_basis(static_cast<int>(state.range(1)), static_cast<int>(state.range(1)));
  const Eigen::VectorXd c = random_vector(Eigen::Index{1} << state.range(0));
  for (auto _ : state) {
    auto p = wpinn::fwt_decompose(c, basis);
    benchmark::DoNotOptimize(p.coarse.data());
  }
  state.SetItemsProcessed(state.iterations() * c.size());
}

void BM_FwtRoundTrip(benchmark::State& state) {
  const auto basis = wpinn::make_basis(static_cast<int>(state.range(1)), static_cast<int>(state.range(1)));
  const Eigen::VectorXd c = random_vector(Eigen::Index{1} << state.range(0));
  for (auto _ : state) {
    auto rec = wpinn::fwt_reconstruct(wpinn::fwt_decompose(c, basis), basis);
    benchmark::DoNotOptimize(rec.data());
  }
  state.SetItemsProcessed(state.iterations() * c.size());
}

}  // namespace

BENCHMARK(BM_FwtDecompose)->ArgsProduct({{10, 12, 14, 16, 18}, {2, 4}});
BENCHMARK(BM_FwtRoundTrip)->ArgsProduct({{10, 14, 18}, {2, 4}});

BENCHMARK_MAIN();
