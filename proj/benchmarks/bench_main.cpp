#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "topokinetic/bernstein.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/particles.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/rank.hpp"

namespace tk = topokinetic;

namespace {

std::vector<double> random_positions(std::size_t n) {
  tk::Engine eng(5);
  std::vector<double> x(n);
  for (double& v : x) v = -10.0 + 20.0 * tk::uniform01(eng);
  return x;
}

void leader_selection(benchmark::State& state, tk::SelectionStrategy strategy) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_positions(n);
  const auto table = tk::build_discrete_table(tk::RankKernel::smooth_cutoff(0.5, 0.2), n);
  const auto metric = tk::Metric::euclidean(1);
  tk::LeaderSelector selector;
  tk::Engine eng(9);
  for (auto _ : state) {
    const auto focal = static_cast<std::size_t>(tk::uniform01(eng) * n);
    benchmark::DoNotOptimize(selector.select(x, metric, table, focal, tk::uniform01(eng), strategy));
  }
  state.SetComplexityN(state.range(0));
}

void BM_SelectQuickselect(benchmark::State& s) { leader_selection(s, tk::SelectionStrategy::Quickselect); }
void BM_SelectFullSort(benchmark::State& s) { leader_selection(s, tk::SelectionStrategy::FullSort); }
BENCHMARK(BM_SelectQuickselect)->RangeMultiplier(4)->Range(16, 16384)->Complexity();
BENCHMARK(BM_SelectFullSort)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_ParticleEvents(benchmark::State& state) {
  tk::SimConfig c;
  c.n = static_cast<std::size_t>(state.range(0));
  c.kernel = tk::RankKernel::power_law(1.0);
  tk::ParticleSimulation sim(c);
  for (auto _ : state) benchmark::DoNotOptimize(sim.next_event());
}
BENCHMARK(BM_ParticleEvents)->Arg(100)->Arg(1000)->Arg(10000);

tk::KineticState wave(std::size_t cells, std::size_t classes) {
  std::vector<double> v;
  std::vector<double> phase;
  for (std::size_t a = 0; a < classes; ++a) {
    v.push_back(-1.0 + 2.0 * a / static_cast<double>(classes));
    phase.push_back(0.3 * a);
  }
  return tk::modulated_state(1.0, cells, v, {}, std::vector<double>(classes, 0.5), phase);
}

void BM_GainOperator(benchmark::State& state) {
  const auto s = wave(static_cast<std::size_t>(state.range(0)), 8);
  const auto kernel = tk::RankKernel::smooth_cutoff(0.5, 0.2);
  for (auto _ : state) {
    const tk::PartialMassTable table(s, kernel);
    benchmark::DoNotOptimize(tk::gain_operator(s, table));
  }
}
BENCHMARK(BM_GainOperator)->Arg(64)->Arg(256)->Arg(1024);

void BM_KineticStep(benchmark::State& state, tk::StepOptions options) {
  auto s = wave(256, static_cast<std::size_t>(state.range(0)));
  const auto kernel = tk::RankKernel::smooth_cutoff(0.5, 0.2);
  for (auto _ : state) tk::step(s, kernel, 0.01, options);
}
BENCHMARK_CAPTURE(BM_KineticStep, lie_euler, tk::StepOptions{})->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(BM_KineticStep, strang_exponential,
                  tk::StepOptions{tk::Splitting::Strang, tk::CollisionScheme::Exponential, true})
    ->Arg(8)
    ->Arg(32);

void BM_BernsteinEval(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = tk::RankKernel::smooth_cutoff(0.5, 0.2);
  const auto f = [&](double r) { return k.value(r); };
  for (auto _ : state) benchmark::DoNotOptimize(tk::bernstein_eval(f, n, 0.37));
}
BENCHMARK(BM_BernsteinEval)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
