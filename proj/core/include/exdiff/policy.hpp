#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "exdiff/network.hpp"

namespace exdiff {

enum class CombinationRule {
  hastings,         // locally balanced weights from (q, mu)
  averaging,        // uniform over the self-inclusive neighborhood
  relative_degree,  // neighbor weights proportional to neighbor degrees
  metropolis,       // doubly-stochastic, 1/max(n_k, n_l) off-diagonal
  max_degree,       // doubly-stochastic, 1/N off-diagonal
  custom,           // loaded matrix, no generating rule
};

std::string to_string(CombinationRule rule);
std::optional<CombinationRule> rule_from_string(const std::string& name);

// Left-stochastic combination matrix with its Perron vector.
//
// Storage convention: A(l, k) = a_lk is the weight agent k places on the
// value received from neighbor l, so every *column* of A sums to one and the
// combine step for row-stacked iterates W (one row per agent) is A^T * W.
// The Perron vector satisfies A p = p, 1^T p = 1, p > 0 (unique when A is
// primitive).
struct CombinationPolicy {
  Eigen::MatrixXd A;
  Eigen::VectorXd perron;
  CombinationRule rule = CombinationRule::custom;

  int size() const { return static_cast<int>(A.rows()); }
};

// Per-agent step-sizes mu_k plus the scalars they derive from, tied together
// by the defining identity q = beta * diag(mu) * p.
struct StepSizeProfile {
  Eigen::VectorXd mu;   // per-agent step-sizes, > 0
  Eigen::VectorXd q;    // positive influence weights
  Eigen::VectorXd tau;  // mu_k / mu_max, each in (0, 1]
  double mu_o = 0.0;    // scalar step parameter the profile was built from
  double beta = 0.0;    // normalization in q = beta * diag(mu) * p
};

struct PolicyBuild {
  CombinationPolicy policy;
  StepSizeProfile steps;
};

// Builds the combination matrix, Perron vector, and step-size profile for one
// of the generating rules on `net`.
//
//   hastings:        a_lk = (mu_k/q_k) / max{n_k mu_k/q_k, n_l mu_l/q_l} for
//                    l != k in N_k, diagonal = complement; p_k prop. q_k/mu_k;
//                    beta = sum_l q_l/mu_l. Step-sizes are the *input*
//                    (mu_override, default uniform mu_o).
//   averaging:       a_lk = 1/n_k on N_k; p_k = n_k / sum_m n_m;
//                    mu_k = q_k mu_o / n_k; beta = (sum_m n_m)/mu_o.
//   relative_degree: a_lk = n_l / S_k with S_k = sum_{m in N_k} n_m;
//                    p_k prop. n_k S_k; mu_k = q_k mu_o / (n_k S_k);
//                    beta = (sum_j n_j S_j)/mu_o.
//   metropolis:      a_lk = 1/max(n_k, n_l) off-diagonal on N_k, diagonal =
//                    complement; p = 1/N; mu_k = q_k N mu_o; beta = 1/mu_o.
//   max_degree:      a_lk = 1/N off-diagonal on N_k, diagonal = complement;
//                    p, mu, beta as metropolis.
//
// q defaults to all-ones. Throws std::invalid_argument for rule == custom,
// non-positive mu_o, or size mismatches.
PolicyBuild build_policy(const Network& net, CombinationRule rule, double mu_o,
                         const Eigen::VectorXd& q = Eigen::VectorXd(),
                         const Eigen::VectorXd& mu_override = Eigen::VectorXd());

// Closed-form Perron vector for a generating rule (see build_policy table).
// `mu` is only consulted by the hastings rule (empty -> uniform). Throws for
// rule == custom.
Eigen::VectorXd perron_closed_form(const Network& net, CombinationRule rule,
                                   const Eigen::VectorXd& q = Eigen::VectorXd(),
                                   const Eigen::VectorXd& mu = Eigen::VectorXd());

// Perron vector of a primitive left-stochastic matrix via the dense
// eigensolver: eigenvalue closest to 1, eigenvector normalized to sum 1.
// Throws std::runtime_error if the result is not strictly positive or
// ||A p - p||_inf > 1e-8.
Eigen::VectorXd perron_from_matrix(const Eigen::MatrixXd& A);

struct PerronEstimate {
  Eigen::VectorXd p;  // (z_{k,i}(k))_k at termination
  int iterations = 0;
};

// Decentralized Perron estimation: every agent k tracks z_k with
// z_{k,-1} = e_k and z_{k,i} = sum_{l in N_k} abar_lk z_{l,i-1}, where
// Abar = (I + A)/2; agent k reads off its own entry z_{k,i}(k) -> p_k.
// Stops when max_k |z_{k,i}(k) - z_{k,i-1}(k)| < tol; throws
// std::runtime_error if max_iters is exceeded first.
PerronEstimate perron_power_iteration(const CombinationPolicy& policy,
                                      double tol = 1e-12, int max_iters = 100000);

struct PolicyValidation {
  bool left_stochastic = false;  // columns sum to 1, entries >= 0
  bool primitive = false;        // strongly connected support, positive trace
  bool balanced = false;         // a_lk p_k == a_kl p_l for all pairs
  double max_column_sum_error = 0.0;
  double max_balance_residual = 0.0;  // max_|a_lk p_k - a_kl p_l|
  double min_entry = 0.0;

  bool ok() const { return left_stochastic && primitive && balanced; }
};

// Checks stochasticity, primitivity, and local balance of (A, p) within tol.
PolicyValidation validate_policy(const CombinationPolicy& policy, double tol = 1e-10);

struct LemmaCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  // the measured quantity the check thresholds
  std::string detail;
};

struct LemmaReport {
  bool preconditions_ok = false;  // left-stochastic + primitive + balanced
  std::string precondition_detail;
  std::vector<LemmaCheck> checks;

  bool all_pass() const;
};

// Verifies the structural consequences of local balance on (A, p):
//   * B = A P - P + I is symmetric, entrywise nonnegative, doubly stochastic,
//     and primitive (P = diag(p));
//   * P - A P is positive semi-definite with a one-dimensional nullspace
//     spanned by the all-ones vector;
//   * A is similar to the symmetric P^{-1/2} A P^{1/2}, so its eigenvalues
//     are real, lie in (-1, 1], and the eigenvalue 1 is simple.
// If the policy fails validation the report only carries the precondition
// failure (checks empty).
LemmaReport verify_lemma_properties(const CombinationPolicy& policy);

// Symmetric PSD square root V of (P - A P)/2: eigendecomposition U S U^T with
// eigenvalues in [-1e-12, 1e-13) clamped to zero (sqrt would amplify a
// machine-precision nullspace residue), V = U S^{1/2} U^T. V satisfies
// V^2 = (P - A P)/2 and null(V) = span{1}. Throws std::invalid_argument if
// the policy is not balanced (the matrix must be symmetric PSD).
Eigen::MatrixXd square_root_V(const CombinationPolicy& policy);

// Step-size profile for a policy without a generating rule: mu_k = q_k mu_o /
// p_k and beta = 1/mu_o, i.e. the step matrix mu_o P^{-1} diag(q). Satisfies
// q = beta * diag(mu) * p identically. q defaults to all-ones.
StepSizeProfile custom_step_profile(const CombinationPolicy& policy, double mu_o,
                                    const Eigen::VectorXd& q = Eigen::VectorXd());

// Reads a custom policy from JSON: {"A": [[...], ...], "p": [...]} where "p"
// is optional (computed by perron_from_matrix when absent). A is stored
// row-major in the file with A[l][k] = a_lk. Throws std::invalid_argument on
// malformed input, a non-square matrix, or columns that do not sum to 1
// within 1e-9.
CombinationPolicy load_custom_policy(const std::string& path);

}  // namespace exdiff
