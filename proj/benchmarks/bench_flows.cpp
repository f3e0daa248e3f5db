#include <benchmark/benchmark.h>

#include "dsm/flow_integrator.hpp"
#include "dsm/problem_zoo.hpp"
#include "dsm/regularized_path.hpp"

namespace {

void BM_IntegrateNewton(benchmark::State& state) {
  const dsm::OperatorProblem p = dsm::make_zoo_problem("wellposed_smooth:16:1");
  const dsm::PhiField phi = dsm::make_wellposed_phi(p, dsm::Method::newton);
  dsm::StepperSpec spec;
  spec.kind = static_cast<dsm::StepperKind>(state.range(0));
  spec.h = 1e-2;
  spec.t_max = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(dsm::integrate(phi, p.u0, spec));
}
BENCHMARK(BM_IntegrateNewton)
    ->Arg(static_cast<int>(dsm::StepperKind::rk4))
    ->Arg(static_cast<int>(dsm::StepperKind::rk45_adaptive));

void BM_CoupledFlow(benchmark::State& state) {
  const dsm::OperatorProblem p = dsm::make_zoo_problem("wellposed_smooth:6:1");
  const dsm::Matrix q0 = 1.01 * p.jacobian(p.u0).inverse();
  dsm::StepperSpec spec;
  spec.t_max = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsm::integrate_coupled(dsm::CoupledField(p, q0), p.u0, q0, spec));
  }
}
BENCHMARK(BM_CoupledFlow);

void BM_DiscreteNewton(benchmark::State& state) {
  const dsm::OperatorProblem p = dsm::make_zoo_problem("wellposed_smooth:64:1");
  for (auto _ : state) benchmark::DoNotOptimize(dsm::discrete_newton(p, p.u0, 20, 1e-12));
}
BENCHMARK(BM_DiscreteNewton);

void BM_SpectralOracle(benchmark::State& state) {
  const dsm::OperatorProblem p = dsm::make_zoo_problem("hilbert:10");
  const dsm::Matrix a = p.jacobian(p.u0);
  const dsm::LinearSpectralOracle o(a, p.rhs, p.u0, dsm::EpsilonSchedule::power(0.02, 0.013, 0.9));
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(o.precond(t));
}
BENCHMARK(BM_SpectralOracle)->Arg(10)->Arg(1000);

}  // namespace
