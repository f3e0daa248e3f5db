#include <benchmark/benchmark.h>

#include <string>

#include "dsm/phi_fields.hpp"
#include "dsm/problem_zoo.hpp"
#include "dsm/regularized_path.hpp"

namespace {

void BM_NewtonField(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const dsm::OperatorProblem p = dsm::make_zoo_problem("wellposed_smooth:" + std::to_string(n) + ":1");
  const dsm::PhiField phi = dsm::make_wellposed_phi(p, dsm::Method::newton);
  for (auto _ : state) benchmark::DoNotOptimize(phi(0.0, p.u0));
}
BENCHMARK(BM_NewtonField)->Arg(8)->Arg(32)->Arg(128);

void BM_MonotoneRegNewtonField(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const dsm::OperatorProblem p = dsm::make_zoo_problem("monotone_cubic:" + std::to_string(n) + ":1");
  const auto s = dsm::EpsilonSchedule::power(1, 1, 0.5);
  const dsm::PhiField phi =
      dsm::make_monotone_phi(p, dsm::MonotoneVariant::regularized_newton, s, dsm::Vector::Zero(n));
  for (auto _ : state) benchmark::DoNotOptimize(phi(1.0, p.u0));
}
BENCHMARK(BM_MonotoneRegNewtonField)->Arg(8)->Arg(32)->Arg(128);

void BM_LinearPrecondField(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const dsm::OperatorProblem p = dsm::make_zoo_problem("fredholm:" + std::to_string(n));
  const auto s = dsm::EpsilonSchedule::power(0.1, 1, 0.5);
  const dsm::PhiField phi = dsm::make_linear_phi(p, dsm::LinearVariant::preconditioned, s);
  for (auto _ : state) benchmark::DoNotOptimize(phi(1.0, p.u0));
}
BENCHMARK(BM_LinearPrecondField)->Arg(16)->Arg(64);

void BM_SolveV(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const dsm::OperatorProblem p = dsm::make_zoo_problem("monotone_cubic:" + std::to_string(n) + ":2");
  const dsm::Vector z = dsm::Vector::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(dsm::solve_V(p, 1e-3, z));
}
BENCHMARK(BM_SolveV)->Arg(8)->Arg(32);

}  // namespace
