#include <random>

#include <benchmark/benchmark.h>

#include "risnoma/beamforming.hpp"
#include "risnoma/cone.hpp"
#include "risnoma/driver.hpp"
#include "risnoma/intra_cpa.hpp"
#include "risnoma/phase_opt.hpp"

using namespace risnoma;

namespace {

Scenario desk(int N_s = 16) {
  SystemConfig sys = desk_scale_config();
  sys.N_s = N_s;
  return validate(sys, AlgorithmConfig{});
}

// Ball-constrained linear program with a few random halfspaces.
ConeProgram ball_program(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  ConeProgram p(n);
  for (int i = 0; i < n; ++i) p.objective[i] = N(rng);
  p.add_soc({RMat::Identity(n, n), RVec::Zero(n), RVec::Zero(n), 1.0});
  for (int k = 0; k < n; ++k) {
    RVec a(n);
    for (int i = 0; i < n; ++i) a[i] = N(rng);
    p.add_ineq(a, 0.5);
  }
  return p;
}

}  // namespace

static void BM_ConeSolve(benchmark::State& state) {
  const ConeProgram p = ball_program(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_ConeSolve)->Arg(9)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

static void BM_ClusterSplit(benchmark::State& state) {
  const ClusterAllocationInput in{{1.0, 3.0, 7.0, 20.0}, {0.1, 0.1, 0.1, 0.1}, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(allocate(in));
}
BENCHMARK(BM_ClusterSplit);

static void BM_BeamformingStep(benchmark::State& state) {
  const Scenario s = desk();
  const ChannelSet ch = generate(s, 1);
  const CVec v = random_phases(16, 1);
  const auto boot = beamforming::bootstrap(s, ch, v, SinrModel::Sic);
  const auto problem = beamforming::make_problem(s, ch, v, boot.noma, SinrModel::Sic);
  for (auto _ : state) {
    beamforming::State st{boot.w, 0.0, 0};
    benchmark::DoNotOptimize(beamforming::optimize(st, problem, s.alg));
  }
}
BENCHMARK(BM_BeamformingStep)->Unit(benchmark::kMillisecond);

static void BM_PhaseStep(benchmark::State& state) {
  const int N_s = static_cast<int>(state.range(0));
  const Scenario s = desk(N_s);
  const ChannelSet ch = generate(s, 1);
  const CVec v = random_phases(N_s, 1);
  const auto boot = beamforming::bootstrap(s, ch, v, SinrModel::Sic);
  for (auto _ : state) benchmark::DoNotOptimize(phase::step(s, ch, boot.w, v, boot.noma, SinrModel::Sic));
}
BENCHMARK(BM_PhaseStep)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_FullRun(benchmark::State& state) {
  const auto method = static_cast<MethodKind>(state.range(0));
  const Scenario s = desk();
  const ChannelSet ch = generate(s, 3);
  for (auto _ : state) benchmark::DoNotOptimize(run(s, ch, method, 3));
  state.SetLabel(to_string(method));
}
BENCHMARK(BM_FullRun)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
