#include <benchmark/benchmark.h>

#include "fjcert/engine.hpp"
#include "generators.hpp"

namespace {

using namespace fjcert;

void BM_FarkasDecide(benchmark::State& state) {
  testing::Gen g(7);
  std::vector<testing::FarkasInstance> suite;
  for (int i = 0; i < 64; ++i) suite.push_back(testing::random_farkas_instance(g));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = suite[i++ % suite.size()];
    benchmark::DoNotOptimize(farkas_decide(inst.phis, inst.a));
  }
}
BENCHMARK(BM_FarkasDecide);

void BM_StrictFeasibility(benchmark::State& state) {
  testing::Gen g(8);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto phis = g.family(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(strict_feasibility(phis, n));
}
BENCHMARK(BM_StrictFeasibility)->Arg(2)->Arg(4)->Arg(8);

void BM_FullCertifyCircle(benchmark::State& state) {
  const auto lp = load_problem(
      "vars: x, y\nmaximize: x + y\ng1: 1 - x^2 >= 0\nh1: x^2 + y^2 - 2 == 0\npoint: x = 1, y = 1\n");
  for (auto _ : state) benchmark::DoNotOptimize(full_certify(lp.problem, *lp.point));
}
BENCHMARK(BM_FullCertifyCircle);

void BM_Gradient(benchmark::State& state) {
  testing::Gen g(9);
  const std::vector<std::string> vars{"x", "y", "z"};
  const Expr e = parse_expression(testing::random_expression_text(g, vars, 5), vars);
  const std::vector<double> p{0.3, -0.2, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(gradient(e, p));
}
BENCHMARK(BM_Gradient);

}  // namespace

BENCHMARK_MAIN();
