#include <benchmark/benchmark.h>

#include <vector>

#include "gaudin/bethe.hpp"
#include "gaudin/gaudin.hpp"
#include "gaudin/opers.hpp"

using namespace gaudin;

namespace {

Weight wt(std::vector<int> c) {
  std::vector<Rat> r(c.begin(), c.end());
  return Weight(r);
}

GaudinProblem<Rat> chain(int sites, int lambda) {
  GaudinProblem<Rat> p;
  p.rd = RootData::type_a(1);
  for (int i = 0; i < sites; ++i) {
    p.points.push_back(Rat(i));
    p.weights.push_back(wt({lambda}));
  }
  return p;
}

void bm_irreducible_a2(benchmark::State& state) {
  const auto rd = RootData::type_a(2);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(irreducible_rep(rd, wt({k, k})));
  state.SetLabel("dim " + std::to_string(static_cast<long>(rat_to_double(
                     weyl_dimension(rd, wt({static_cast<int>(state.range(0)),
                                            static_cast<int>(state.range(0))}))))));
}

void bm_hamiltonian_assembly(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto p = chain(sites, 1);
  const auto t = tensor_irreducibles(p.rd, p.weights);
  for (auto _ : state)
    for (int i = 0; i < sites; ++i) benchmark::DoNotOptimize(gaudin_hamiltonian(p, t, i));
  state.SetLabel("dim " + std::to_string(t.dim()));
}

void bm_solve_bae(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto p = complexify(chain(sites, 1));
  const ColorAssignment colors(static_cast<std::size_t>(sites / 2), 0);
  SolverConfig cfg;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bae(p, colors, cfg));
}

void bm_joint_spectrum(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto p = chain(sites, 1);
  const auto t = tensor_irreducibles(p.rd, p.weights);
  const Weight mu = wt({sites % 2});
  for (auto _ : state) benchmark::DoNotOptimize(joint_spectrum(p, t, mu));
}

void bm_bethe_vector(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto p = complexify(chain(sites, 1));
  const auto t = tensor_irreducibles(p.rd, p.weights);
  const ColorAssignment colors(static_cast<std::size_t>(sites / 2), 0);
  SolverConfig cfg;
  cfg.seed = 1;
  const auto sr = solve_bae(p, colors, cfg);
  if (sr.solutions.empty()) {
    state.SkipWithError("no root to expand");
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(bethe_vector(p, sr.solutions[0], t));
}

void bm_miura_pipeline(benchmark::State& state) {
  const auto p = complexify(chain(4, 1));
  SolverConfig cfg;
  cfg.seed = 1;
  const auto sr = solve_bae(p, ColorAssignment(2, 0), cfg);
  if (sr.solutions.empty()) {
    state.SkipWithError("no root to expand");
    return;
  }
  const auto& s = sr.solutions[0];
  for (auto _ : state) {
    const auto oper = miura_oper(p, s);
    double acc = 0.0;
    for (const auto& w : s.w) acc += regularity_check(oper, w).worst;
    benchmark::DoNotOptimize(acc);
  }
}

BENCHMARK(bm_irreducible_a2)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_hamiltonian_assembly)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_solve_bae)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_joint_spectrum)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_bethe_vector)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_miura_pipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
