#include <benchmark/benchmark.h>

#include "uavris/channel.hpp"
#include "uavris/ddqn.hpp"
#include "uavris/env.hpp"
#include "uavris/harness.hpp"
#include "uavris/signal.hpp"

using namespace uavris;

namespace {

Scenario bench_scenario(int n_users) {
  ScenarioConfig cfg;
  cfg.arena_x = cfg.arena_y = 50;
  cfg.n_buildings = 6;
  cfg.n_users = n_users;
  cfg.uav_altitude = 30;
  cfg.seed = 99;
  Rng rng(cfg.seed);
  return generate_scenario(cfg, rng);
}

void BM_IsLos(benchmark::State& state) {
  const Scenario sc = bench_scenario(2);
  Rng rng(1);
  for (auto _ : state) {
    const Vec3 p{rng.uniform(0, 50), rng.uniform(0, 50), 30};
    const Vec3 q{rng.uniform(0, 50), rng.uniform(0, 50), 0};
    benchmark::DoNotOptimize(is_los(sc.map, p, q));
  }
}
BENCHMARK(BM_IsLos);

void BM_DrawChannel(benchmark::State& state) {
  const Scenario sc = bench_scenario(2);
  ChannelParams params;
  Rng rng(2);
  ChannelGeometry geo;
  geo.uav_x = 25;
  geo.uav_y = 25;
  geo.uav_altitude = sc.uav_altitude;
  geo.ris_position = sc.ris_position;
  for (const auto& u : sc.users) geo.user_xy.push_back({u.x, u.y});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(draw_channel(geo, 4, n, params, sc.map,
                                          LosMode::kRadioMap, true, rng));
}
BENCHMARK(BM_DrawChannel)->Arg(8)->Arg(24)->Arg(64);

void BM_ZfPrecoder(benchmark::State& state) {
  Rng rng(3);
  const int m = static_cast<int>(state.range(0));
  const int k = m / 2;
  CombinedChannel h;
  h.rows = CMat(k, m);
  for (auto& v : h.rows.data) v = cplx(rng.normal(), rng.normal());
  for (auto _ : state) benchmark::DoNotOptimize(zf_precoder(h));
}
BENCHMARK(BM_ZfPrecoder)->Arg(4)->Arg(8)->Arg(16);

void BM_EnvStep(benchmark::State& state) {
  Scenario sc = bench_scenario(2);
  EnvConfig cfg;
  cfg.n_antennas = 4;
  cfg.n_elements = 8;
  cfg.horizon = 1 << 30;
  Environment env(sc, ChannelParams{}, RotorParams{}, cfg);
  Rng rng(4);
  NetworkState s = env.reset(rng);
  for (auto _ : state) {
    const int a = static_cast<int>(rng.uniform_index(env.action_count()));
    StepOutcome out = env.step(s, a, rng);
    s = std::move(out.next_state);
  }
}
BENCHMARK(BM_EnvStep);

void BM_GradientStep(benchmark::State& state) {
  Rng rng(5);
  QNetwork net({24, 50, 50, 25}, rng);
  QNetwork target = net;
  ReplayMemory mem(10000);
  for (int i = 0; i < 1000; ++i) {
    Transition t;
    t.state.resize(24);
    t.next_state.resize(24);
    for (auto& v : t.state) v = rng.uniform(-1, 1);
    for (auto& v : t.next_state) v = rng.uniform(-1, 1);
    t.action = static_cast<int>(rng.uniform_index(25));
    t.reward = rng.uniform(-10, 10);
    mem.push(t);
  }
  for (auto _ : state) {
    const auto batch = mem.sample_indices(128, rng);
    const auto targets = td_targets(mem, batch, target, 0.85);
    benchmark::DoNotOptimize(gradient_step(net, mem, batch, targets, 0.01));
  }
}
BENCHMARK(BM_GradientStep);

void BM_Forward(benchmark::State& state) {
  Rng rng(6);
  QNetwork net({24, 50, 50, 25}, rng);
  std::vector<double> x(24);
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward);

}  // namespace

BENCHMARK_MAIN();
