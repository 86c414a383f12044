#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "exdiff/costs.hpp"
#include "exdiff/policy.hpp"

namespace exdiff {

enum class Algorithm {
  diffusion,                 // adapt-then-combine, O(mu^2) bias
  penalized_incremental,     // incremental step on the penalized objective
  exact_diffusion,           // adapt - correct - combine, bias-free
  exact_diffusion_adaptive,  // exact diffusion with decentralized step-sizes
  primal_dual,               // saddle-point recursion, identical iterates
};

std::string to_string(Algorithm alg);
std::optional<Algorithm> algorithm_from_string(const std::string& name);

// Mutable per-run state. W holds the current iterates, one row per agent
// (N x M). The remaining fields are touched only by the algorithms that need
// them and are sized by make_state.
struct SolverState {
  Eigen::MatrixXd W;
  Eigen::MatrixXd psi_prev;  // exact diffusion: psi_{., i-1}, init = W_{-1}
  Eigen::MatrixXd Y;         // primal-dual: dual variable, init 0
  Eigen::MatrixXd Z;         // adaptive: column k is z_k, init identity
  Eigen::VectorXd mu_eff;    // adaptive: step-sizes actually used this step
  long iter = 0;             // completed steps
};

// Precomputed per-run quantities shared by the step kernels. Build once with
// make_workspace; the step functions never modify it.
struct SolverWorkspace {
  Algorithm algorithm = Algorithm::exact_diffusion;
  Eigen::MatrixXd At;      // A^T
  Eigen::MatrixXd Abar_t;  // ((I + A)/2)^T
  Eigen::MatrixXd L;       // P^{-1}(P - A P), penalized incremental only
  Eigen::MatrixXd V;       // square_root_V(policy), primal-dual only
  Eigen::VectorXd inv_p;   // 1/p_k, penalized incremental and primal-dual
  Eigen::VectorXd mu;      // per-agent step-sizes
  Eigen::VectorXd q;
  double mu_o = 0.0;
  double alpha = 0.0;      // 1/beta, penalized incremental only
};

SolverWorkspace make_workspace(Algorithm alg, const CombinationPolicy& policy,
                               const StepSizeProfile& steps);

// Initial state for `alg` from W0 (N x M). psi_prev = W0, Y = 0, Z = I.
SolverState make_state(Algorithm alg, const Eigen::MatrixXd& W0);

// One synchronous iteration each. All agents first compute their local
// update from the pre-step state, then all combination sums are taken; the
// two phases never interleave (matrix products make this exact).
//
// diffusion:             psi = W - diag(mu) grad, W <- A^T psi
// penalized_incremental: psi = W - alpha P^{-1} diag(q) grad,
//                        W <- psi - P^{-1}(P - A P) psi
// exact_diffusion:       psi = W - diag(mu) grad, phi = psi + W - psi_prev,
//                        W <- Abar^T phi
// adaptive variant:      Z <- Z Abar first, mu_k = q_k mu_o / Z_kk, then the
//                        exact-diffusion step with those step-sizes
// primal_dual:           W <- Abar^T (W - diag(mu) grad) - P^{-1} V Y,
//                        Y <- Y + V W
void diffusion_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);
void penalized_incremental_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);
void exact_diffusion_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);
void exact_diffusion_adaptive_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);
void primal_dual_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);

// Dispatch on ws.algorithm.
void step(SolverState& s, const SolverWorkspace& ws, const CostModel& model);

struct RunConfig {
  Algorithm algorithm = Algorithm::exact_diffusion;
  int max_iters = 1000;
  // Stop once rel_error drops to or below this value.
  std::optional<double> stop_rel_error;
  double divergence_threshold = 1e12;
  bool record_cost = false;  // per-iteration sum_k q_k J_k(w_k)
  // Initial iterates (N x M); zeros when absent.
  std::optional<Eigen::MatrixXd> w_init;
  // Reference minimizer w* for the error metric; global_minimizer(model, q)
  // when absent.
  std::optional<Eigen::VectorXd> reference;
};

struct Trajectory {
  // rel_error[i] = ||W_i - 1 w*^T||_F^2 / ||W_0 - 1 w*^T||_F^2, recorded from
  // W_0 on, so rel_error[0] == 1 exactly (0 in the degenerate case W_0 = W*,
  // where absolute squared errors are recorded instead).
  std::vector<double> rel_error;
  std::vector<double> cost;  // filled only when record_cost
  bool diverged = false;
  long divergence_iter = -1;  // steps completed when divergence was detected
  long iterations = 0;        // completed steps
};

// Runs `config.algorithm` and records the error trajectory. A step producing
// a non-finite or > divergence_threshold relative error sets `diverged` and
// halts (the non-finite value itself is not recorded).
Trajectory run(const CombinationPolicy& policy, const StepSizeProfile& steps,
               const CostModel& model, const RunConfig& config);

// Mean of the final ceil(fraction * size) recorded values - the steady-state
// plateau estimate used by the bias-scaling checks.
double plateau(const std::vector<double>& rel_error, double fraction = 0.1);

}  // namespace exdiff
