#include "exdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exdiff {

namespace {

// All block recursions act on row-stacked iterates: a block operator B
// applied to the stacked vector col{w_1..w_N} is the left product B * W for
// the N x M matrix W whose row k is w_k^T.

void check_dims(const SolverWorkspace& ws, const CostModel& model) {
  if (ws.At.rows() != model.agents())
    throw std::invalid_argument("solver: policy and cost model disagree on N");
}

double rowwise_cost(const CostModel& model, const Eigen::VectorXd& q,
                    const Eigen::MatrixXd& W) {
  double total = 0.0;
  for (int k = 0; k < model.agents(); ++k)
    total += q(k) * model.value(k, W.row(k).transpose());
  return total;
}

}  // namespace

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::diffusion: return "diffusion";
    case Algorithm::penalized_incremental: return "penalized_incremental";
    case Algorithm::exact_diffusion: return "exact_diffusion";
    case Algorithm::exact_diffusion_adaptive: return "exact_diffusion_adaptive";
    case Algorithm::primal_dual: return "primal_dual";
  }
  return "exact_diffusion";
}

std::optional<Algorithm> algorithm_from_string(const std::string& name) {
  if (name == "diffusion") return Algorithm::diffusion;
  if (name == "penalized_incremental") return Algorithm::penalized_incremental;
  if (name == "exact_diffusion") return Algorithm::exact_diffusion;
  if (name == "exact_diffusion_adaptive") return Algorithm::exact_diffusion_adaptive;
  if (name == "primal_dual") return Algorithm::primal_dual;
  return std::nullopt;
}

SolverWorkspace make_workspace(Algorithm alg, const CombinationPolicy& policy,
                               const StepSizeProfile& steps) {
  const int n = policy.size();
  if (steps.mu.size() != n || steps.q.size() != n)
    throw std::invalid_argument("solver: step profile does not match policy size");
  SolverWorkspace ws;
  ws.algorithm = alg;
  ws.At = policy.A.transpose();
  ws.Abar_t = 0.5 * (Eigen::MatrixXd::Identity(n, n) + policy.A).transpose();
  ws.mu = steps.mu;
  ws.q = steps.q;
  ws.mu_o = steps.mu_o;
  if (alg == Algorithm::penalized_incremental) {
    if (!(steps.beta > 0.0))
      throw std::invalid_argument("solver: penalized form needs beta > 0");
    ws.alpha = 1.0 / steps.beta;
    ws.inv_p = policy.perron.cwiseInverse();
    const Eigen::MatrixXd P = policy.perron.asDiagonal();
    ws.L = ws.inv_p.asDiagonal() * (P - policy.A * P);
  }
  if (alg == Algorithm::primal_dual) {
    ws.V = square_root_V(policy);
    ws.inv_p = policy.perron.cwiseInverse();
  }
  return ws;
}

SolverState make_state(Algorithm alg, const Eigen::MatrixXd& W0) {
  SolverState s;
  s.W = W0;
  if (alg == Algorithm::exact_diffusion || alg == Algorithm::exact_diffusion_adaptive)
    s.psi_prev = W0;  // psi_{k,-1} = w_{k,-1}
  if (alg == Algorithm::primal_dual)
    s.Y = Eigen::MatrixXd::Zero(W0.rows(), W0.cols());
  if (alg == Algorithm::exact_diffusion_adaptive) {
    s.Z = Eigen::MatrixXd::Identity(W0.rows(), W0.rows());  // z_{k,-1} = e_k
    s.mu_eff = Eigen::VectorXd::Zero(W0.rows());
  }
  return s;
}

void diffusion_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model) {
  check_dims(ws, model);
  const Eigen::MatrixXd G = model.gradient_all(s.W);
  s.W = ws.At * (s.W - ws.mu.asDiagonal() * G);
  ++s.iter;
}

void penalized_incremental_step(SolverState& s, const SolverWorkspace& ws,
                                const CostModel& model) {
  check_dims(ws, model);
  // One incremental pass over the penalized objective
  //   sum_k q_k J_k(w_k) + (beta/2) ||W||^2_{P - A P}
  // with block step alpha P^{-1}: first descend the separable part, then the
  // penalty, whose gradient step collapses to the affine map psi - L psi.
  const Eigen::MatrixXd G = model.gradient_all(s.W);
  const Eigen::MatrixXd psi =
      s.W - ws.alpha * (ws.q.cwiseProduct(ws.inv_p).asDiagonal() * G);
  s.W = psi - ws.L * psi;
  ++s.iter;
}

void exact_diffusion_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model) {
  check_dims(ws, model);
  const Eigen::MatrixXd G = model.gradient_all(s.W);
  const Eigen::MatrixXd psi = s.W - ws.mu.asDiagonal() * G;  // adapt
  const Eigen::MatrixXd phi = psi + s.W - s.psi_prev;        // correct
  s.W = ws.Abar_t * phi;                                     // combine
  s.psi_prev = psi;
  ++s.iter;
}

void exact_diffusion_adaptive_step(SolverState& s, const SolverWorkspace& ws,
                                   const CostModel& model) {
  check_dims(ws, model);
  // The z-update precedes the descent: agents refresh their Perron estimates
  // by one combination sweep, derive this iteration's step-sizes from the
  // diagonal readouts, then run the usual adapt-correct-combine phases.
  const int n = static_cast<int>(s.W.rows());
  s.Z = s.Z * ws.Abar_t.transpose();  // column k: z_k <- sum_l abar_{lk} z_l
  Eigen::VectorXd mu(n);
  for (int k = 0; k < n; ++k) {
    const double zkk = s.Z(k, k);
    if (!(zkk > 0.0))
      throw std::runtime_error("solver: Perron readout z_k(k) lost positivity");
    mu(k) = ws.q(k) * ws.mu_o / zkk;
  }
  s.mu_eff = mu;
  const Eigen::MatrixXd G = model.gradient_all(s.W);
  const Eigen::MatrixXd psi = s.W - mu.asDiagonal() * G;
  const Eigen::MatrixXd phi = psi + s.W - s.psi_prev;
  s.W = ws.Abar_t * phi;
  s.psi_prev = psi;
  ++s.iter;
}

void primal_dual_step(SolverState& s, const SolverWorkspace& ws, const CostModel& model) {
  check_dims(ws, model);
  const Eigen::MatrixXd G = model.gradient_all(s.W);
  s.W = ws.Abar_t * (s.W - ws.mu.asDiagonal() * G) -
        ws.inv_p.asDiagonal() * (ws.V * s.Y);
  s.Y += ws.V * s.W;
  ++s.iter;
}

void step(SolverState& s, const SolverWorkspace& ws, const CostModel& model) {
  switch (ws.algorithm) {
    case Algorithm::diffusion: diffusion_step(s, ws, model); return;
    case Algorithm::penalized_incremental: penalized_incremental_step(s, ws, model); return;
    case Algorithm::exact_diffusion: exact_diffusion_step(s, ws, model); return;
    case Algorithm::exact_diffusion_adaptive: exact_diffusion_adaptive_step(s, ws, model); return;
    case Algorithm::primal_dual: primal_dual_step(s, ws, model); return;
  }
}

Trajectory run(const CombinationPolicy& policy, const StepSizeProfile& steps,
               const CostModel& model, const RunConfig& config) {
  const int n = model.agents();
  const int m = model.dim();
  if (policy.size() != n)
    throw std::invalid_argument("solver: policy and cost model disagree on N");
  if (config.max_iters < 0)
    throw std::invalid_argument("solver: max_iters must be nonnegative");

  const Eigen::MatrixXd W0 =
      config.w_init ? *config.w_init : Eigen::MatrixXd::Zero(n, m);
  if (W0.rows() != n || W0.cols() != m)
    throw std::invalid_argument("solver: initial iterate has wrong shape");
  const Eigen::VectorXd wstar =
      config.reference ? *config.reference : global_minimizer(model, steps.q);
  if (wstar.size() != m)
    throw std::invalid_argument("solver: reference minimizer has wrong length");

  const Eigen::MatrixXd Wref = Eigen::VectorXd::Ones(n) * wstar.transpose();
  const double denom = (W0 - Wref).squaredNorm();
  // Degenerate start-at-solution corner: record absolute squared errors.
  const double scale = denom > 0.0 ? denom : 1.0;

  SolverWorkspace ws = make_workspace(config.algorithm, policy, steps);
  SolverState s = make_state(config.algorithm, W0);

  Trajectory traj;
  traj.rel_error.reserve(static_cast<size_t>(config.max_iters) + 1);
  traj.rel_error.push_back(denom > 0.0 ? 1.0 : 0.0);
  if (config.record_cost) traj.cost.push_back(rowwise_cost(model, steps.q, s.W));

  for (int i = 0; i < config.max_iters; ++i) {
    step(s, ws, model);
    const double err = (s.W - Wref).squaredNorm() / scale;
    if (!std::isfinite(err)) {
      traj.diverged = true;
      traj.divergence_iter = s.iter;
      break;
    }
    traj.rel_error.push_back(err);
    if (config.record_cost) traj.cost.push_back(rowwise_cost(model, steps.q, s.W));
    if (err > config.divergence_threshold) {
      traj.diverged = true;
      traj.divergence_iter = s.iter;
      break;
    }
    if (config.stop_rel_error && err <= *config.stop_rel_error) break;
  }
  traj.iterations = s.iter;
  return traj;
}

double plateau(const std::vector<double>& rel_error, double fraction) {
  if (rel_error.empty()) throw std::invalid_argument("solver: empty trajectory");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("solver: plateau fraction must lie in (0, 1]");
  const size_t count = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(fraction * static_cast<double>(rel_error.size()))));
  double sum = 0.0;
  for (size_t i = rel_error.size() - count; i < rel_error.size(); ++i)
    sum += rel_error[i];
  return sum / static_cast<double>(count);
}

}  // namespace exdiff
