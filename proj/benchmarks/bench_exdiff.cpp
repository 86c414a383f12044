// Micro-benchmarks for the hot paths: one solver iteration per algorithm,
// policy construction, the spectral-radius evaluation, the Jury table, and
// decentralized Perron estimation. All inputs are seeded and sized to be
// representative of the shipped experiments (20 agents, 10 unknowns).
#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "exdiff/costs.hpp"
#include "exdiff/network.hpp"
#include "exdiff/policy.hpp"
#include "exdiff/solver.hpp"
#include "exdiff/stability.hpp"

namespace {

using namespace exdiff;

struct Fixture {
  Network net = generate_random_network(20, 0.3, 42);
  PolicyBuild pb = build_policy(net, CombinationRule::averaging, 0.01);
  LeastSquaresModel model = generate_least_squares(20, 10, 25, 7);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_solver_step(benchmark::State& state) {
  const Fixture& f = fixture();
  const Algorithm alg = static_cast<Algorithm>(state.range(0));
  const SolverWorkspace ws = make_workspace(alg, f.pb.policy, f.pb.steps);
  SolverState s = make_state(alg, Eigen::MatrixXd::Zero(20, 10));
  for (auto _ : state) {
    step(s, ws, f.model);
    benchmark::DoNotOptimize(s.W.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_solver_step)
    ->Arg(static_cast<int>(Algorithm::diffusion))
    ->Arg(static_cast<int>(Algorithm::penalized_incremental))
    ->Arg(static_cast<int>(Algorithm::exact_diffusion))
    ->Arg(static_cast<int>(Algorithm::exact_diffusion_adaptive))
    ->Arg(static_cast<int>(Algorithm::primal_dual));

void BM_build_policy(benchmark::State& state) {
  const Fixture& f = fixture();
  const CombinationRule rule = static_cast<CombinationRule>(state.range(0));
  for (auto _ : state) {
    const PolicyBuild pb = build_policy(f.net, rule, 0.01);
    benchmark::DoNotOptimize(pb.policy.A.data());
  }
}
BENCHMARK(BM_build_policy)
    ->Arg(static_cast<int>(CombinationRule::hastings))
    ->Arg(static_cast<int>(CombinationRule::averaging))
    ->Arg(static_cast<int>(CombinationRule::relative_degree))
    ->Arg(static_cast<int>(CombinationRule::metropolis));

void BM_spectral_radius(benchmark::State& state) {
  const StabilityExample ex = stability_example(2);
  const ErrorDynamics dyn = build_error_dynamics(ex.A, ex.p, 0.1, ex.h_diag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_radius_excluding_one(dyn));
  }
}
BENCHMARK(BM_spectral_radius);

void BM_jury_degree7(benchmark::State& state) {
  const std::array<double, 8> a = example1_characteristic_poly(0.05);
  const std::vector<double> coeffs(a.begin(), a.end());
  for (auto _ : state) {
    const JuryVerdict v = jury_stability_test(coeffs);
    benchmark::DoNotOptimize(v.failing_condition);
  }
}
BENCHMARK(BM_jury_degree7);

void BM_perron_power_iteration(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    const PerronEstimate est = perron_power_iteration(f.pb.policy, 1e-10);
    benchmark::DoNotOptimize(est.p.data());
  }
  state.SetLabel("tol=1e-10");
}
BENCHMARK(BM_perron_power_iteration);

void BM_validate_policy(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_policy(f.pb.policy).ok());
  }
}
BENCHMARK(BM_validate_policy);

}  // namespace

BENCHMARK_MAIN();
