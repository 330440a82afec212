// Copyright 2026 The cosmo-evo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "cosmo_evo/env.hpp"
#include "cosmo_evo/evolution.hpp"
#include "cosmo_evo/harness.hpp"

namespace {

using namespace cosmo_evo;

env::EnvConfig large_env() {
  env::EnvConfig cfg;
  cfg.length = 8;
  cfg.target = 20;
  return cfg;
}

void BM_OracleSerial(benchmark::State& state) {
  const auto cfg = large_env();
  for (auto _ : state) benchmark::DoNotOptimize(env::oracle_enumerate_serial(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(env::sequence_count(cfg)));
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
  const auto cfg = large_env();
  for (auto _ : state) benchmark::DoNotOptimize(env::oracle_enumerate(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(env::sequence_count(cfg)));
}
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

replay::ReplayBuffer full_buffer(double novelty_mu) {
  const env::EnvConfig cfg;
  replay::ReplayBuffer b(1000);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto s = env::sample_random(rng, cfg);
    const double r = env::reward(s, cfg);
    b.insert(replay::make_item(s, r, r - 6.3, affect::AffectConfig{}, i), novelty_mu);
  }
  return b;
}

void evolve(benchmark::State& state, bool parallel) {
  const double mu = static_cast<double>(state.range(0)) / 10.0;
  const auto seed_buffer = full_buffer(mu);
  evolution::EvoConfig evo;
  evo.weights = {0.3, 0.3, 0.3};
  std::int64_t step = 0;
  for (auto _ : state) {
    state.PauseTiming();
    auto b = seed_buffer;
    state.ResumeTiming();
    evolution::UpdateContext ctx{6.3, 7, step += 10, mu, parallel};
    benchmark::DoNotOptimize(evolution::evolutionary_update(b, env::EnvConfig{}, evo, affect::AffectConfig{}, ctx));
  }
}

void BM_EvolveSerial(benchmark::State& state) { evolve(state, false); }
void BM_EvolveParallel(benchmark::State& state) { evolve(state, true); }
BENCHMARK(BM_EvolveSerial)->Arg(0)->Arg(5)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EvolveParallel)->Arg(0)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_RunVariant(benchmark::State& state) {
  auto cfg = harness::make_config(harness::Variant::kCosmoCoreEvo);
  cfg.evo.weights = {0.3, 0.3, 0.3};
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_variant(cfg, seeds, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RunVariant)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
