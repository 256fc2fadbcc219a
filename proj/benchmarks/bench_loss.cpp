// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/loss.hpp"
#include "wpinn/network.hpp"
#include "wpinn/problems.hpp"

#include <benchmark/benchmark.h>

namespace {

wpinn::LossFunction make_loss(wpinn::LossKind kind, int level) {
  const wpinn::ProblemSpec problem = wpinn::make_problem("problem1");
  wpinn::Architecture arch;
  arch.widths = {1, 64, 64, 64, 1};
  wpinn::LossConfig cfg;
  cfg.kind = kind;
  cfg.level = level;
  if (kind == wpinn::LossKind::WaveletWeak) cfg.basis = wpinn::make_basis(2, 2);
  if (kind == wpinn::LossKind::WaveletUltraWeak) cfg.basis = wpinn::make_basis(4, 4);
  return {problem, arch, cfg};
}

void bench_kind(benchmark::State& state, wpinn::LossKind kind) {
  const auto loss = make_loss(kind, static_cast<int>(state.range(0)));
  wpinn::Architecture arch;
  arch.widths = {1, 64, 64, 64, 1};
  const wpinn::Params theta = wpinn::init_params(arch, 1);
  for (auto _ : state) {
    const double v = loss.value(theta);
    benchmark::DoNotOptimize(v);
  }
}

void BM_LossUltraWeak(benchmark::State& state) { bench_kind(state, wpinn::LossKind::WaveletUltraWeak); }
void BM_LossWeak(benchmark::State& state) { bench_kind(state, wpinn::LossKind::WaveletWeak); }
void BM_LossClassical(benchmark::State& state) { bench_kind(state, wpinn::LossKind::Classical); }
void BM_LossMse(benchmark::State& state) { bench_kind(state, wpinn::LossKind::Mse); }

}  // namespace

BENCHMARK(BM_LossUltraWeak)->DenseRange(3, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossWeak)->DenseRange(3, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossClassical)->DenseRange(3, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossMse)->DenseRange(3, 12, 3)->Unit(benchmark::kMillisecond);
