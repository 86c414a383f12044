#include "exdiff/policy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace exdiff {

namespace {

Eigen::VectorXd ones_or(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() == 0) return Eigen::VectorXd::Ones(n);
  if (v.size() != n) throw std::invalid_argument(std::string("policy: ") + what + " has wrong length");
  return v;
}

void require_positive(const Eigen::VectorXd& v, const char* what) {
  if ((v.array() <= 0.0).any())
    throw std::invalid_argument(std::string("policy: ") + what + " must be strictly positive");
}

// Strong connectivity of the support graph (edge l -> k iff A(l,k) > 0):
// forward BFS from 0 plus BFS on the transposed support.
bool support_strongly_connected(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  for (int transpose = 0; transpose < 2; ++transpose) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        const double w = transpose ? A(v, u) : A(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++reached;
          q.push(v);
        }
      }
    }
    if (reached != n) return false;
  }
  return true;
}

StepSizeProfile finish_profile(Eigen::VectorXd mu, Eigen::VectorXd q, double mu_o, double beta) {
  StepSizeProfile s;
  s.tau = mu / mu.maxCoeff();
  s.mu = std::move(mu);
  s.q = std::move(q);
  s.mu_o = mu_o;
  s.beta = beta;
  return s;
}

}  // namespace

std::string to_string(CombinationRule rule) {
  switch (rule) {
    case CombinationRule::hastings: return "hastings";
    case CombinationRule::averaging: return "averaging";
    case CombinationRule::relative_degree: return "relative_degree";
    case CombinationRule::metropolis: return "metropolis";
    case CombinationRule::max_degree: return "max_degree";
    case CombinationRule::custom: return "custom";
  }
  return "custom";
}

std::optional<CombinationRule> rule_from_string(const std::string& name) {
  if (name == "hastings") return CombinationRule::hastings;
  if (name == "averaging") return CombinationRule::averaging;
  if (name == "relative_degree") return CombinationRule::relative_degree;
  if (name == "metropolis") return CombinationRule::metropolis;
  if (name == "max_degree") return CombinationRule::max_degree;
  if (name == "custom") return CombinationRule::custom;
  return std::nullopt;
}

PolicyBuild build_policy(const Network& net, CombinationRule rule, double mu_o,
                         const Eigen::VectorXd& q_in, const Eigen::VectorXd& mu_override) {
  const int n = net.size();
  if (!(mu_o > 0.0)) throw std::invalid_argument("policy: mu_o must be positive");
  const Eigen::VectorXd q = ones_or(q_in, n, "q");
  require_positive(q, "q");

  Eigen::VectorXd deg(n);
  for (int k = 0; k < n; ++k) deg(k) = net.degree(k);

  CombinationPolicy policy;
  policy.rule = rule;
  policy.A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd& A = policy.A;
  StepSizeProfile steps;

  switch (rule) {
    case CombinationRule::hastings: {
      // Step-sizes are the input here; the matrix and Perron vector follow.
      Eigen::VectorXd mu = mu_override.size() ? mu_override : Eigen::VectorXd::Constant(n, mu_o);
      if (mu.size() != n) throw std::invalid_argument("policy: mu override has wrong length");
      require_positive(mu, "mu");
      const Eigen::VectorXd r = mu.array() / q.array();  // mu_k / q_k
      for (int k = 0; k < n; ++k) {
        double off = 0.0;
        for (int l : net.neighbors(k)) {
          if (l == k) continue;
          A(l, k) = r(k) / std::max(deg(k) * r(k), deg(l) * r(l));
          off += A(l, k);
        }
        A(k, k) = 1.0 - off;
      }
      Eigen::VectorXd p = q.array() / mu.array();
      const double beta = p.sum();
      policy.perron = p / beta;
      steps = finish_profile(std::move(mu), q, mu_o, beta);
      break;
    }
    case CombinationRule::averaging: {
      for (int k = 0; k < n; ++k)
        for (int l : net.neighbors(k)) A(l, k) = 1.0 / deg(k);
      const double total = deg.sum();
      policy.perron = deg / total;
      Eigen::VectorXd mu = mu_o * q.array() / deg.array();
      steps = finish_profile(std::move(mu), q, mu_o, total / mu_o);
      break;
    }
    case CombinationRule::relative_degree: {
      Eigen::VectorXd S(n);  // S_k = sum of neighbor degrees (self included)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l : net.neighbors(k)) s += deg(l);
        S(k) = s;
      }
      for (int k = 0; k < n; ++k)
        for (int l : net.neighbors(k)) A(l, k) = deg(l) / S(k);
      const Eigen::VectorXd w = deg.array() * S.array();  // n_k * S_k
      const double total = w.sum();
      policy.perron = w / total;
      Eigen::VectorXd mu = mu_o * q.array() / w.array();
      steps = finish_profile(std::move(mu), q, mu_o, total / mu_o);
      break;
    }
    case CombinationRule::metropolis:
    case CombinationRule::max_degree: {
      for (int k = 0; k < n; ++k) {
        double off = 0.0;
        for (int l : net.neighbors(k)) {
          if (l == k) continue;
          A(l, k) = rule == CombinationRule::metropolis
                        ? 1.0 / std::max(deg(k), deg(l))
                        : 1.0 / n;
          off += A(l, k);
        }
        A(k, k) = 1.0 - off;
      }
      policy.perron = Eigen::VectorXd::Constant(n, 1.0 / n);
      Eigen::VectorXd mu = static_cast<double>(n) * mu_o * q.array();
      steps = finish_profile(std::move(mu), q, mu_o, 1.0 / mu_o);
      break;
    }
    case CombinationRule::custom:
      throw std::invalid_argument("policy: custom matrices are loaded, not built");
  }
  return {std::move(policy), std::move(steps)};
}

Eigen::VectorXd perron_closed_form(const Network& net, CombinationRule rule,
                                   const Eigen::VectorXd& q_in, const Eigen::VectorXd& mu_in) {
  const int n = net.size();
  const Eigen::VectorXd q = ones_or(q_in, n, "q");
  switch (rule) {
    case CombinationRule::hastings: {
      const Eigen::VectorXd mu = mu_in.size() ? mu_in : Eigen::VectorXd::Ones(n);
      if (mu.size() != n) throw std::invalid_argument("policy: mu has wrong length");
      Eigen::VectorXd p = q.array() / mu.array();
      return p / p.sum();
    }
    case CombinationRule::averaging: {
      Eigen::VectorXd deg(n);
      for (int k = 0; k < n; ++k) deg(k) = net.degree(k);
      return deg / deg.sum();
    }
    case CombinationRule::relative_degree: {
      Eigen::VectorXd w(n);
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l : net.neighbors(k)) s += net.degree(l);
        w(k) = net.degree(k) * s;
      }
      return w / w.sum();
    }
    case CombinationRule::metropolis:
    case CombinationRule::max_degree:
      return Eigen::VectorXd::Constant(n, 1.0 / n);
    case CombinationRule::custom:
      throw std::invalid_argument("policy: no closed-form Perron vector for custom matrices");
  }
  throw std::invalid_argument("policy: unknown rule");
}

Eigen::VectorXd perron_from_matrix(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("policy: matrix must be square and nonempty");
  Eigen::EigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("policy: eigensolver failed");
  int best = 0;
  double best_dist = std::abs(eig.eigenvalues()(0) - std::complex<double>(1.0, 0.0));
  for (int i = 1; i < A.rows(); ++i) {
    const double d = std::abs(eig.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  Eigen::VectorXd p = eig.eigenvectors().col(best).real();
  p /= p.sum();  // also flips sign when the eigensolver returned -p
  if ((p.array() <= 0.0).any())
    throw std::runtime_error("policy: Perron vector is not strictly positive (matrix not primitive?)");
  if ((A * p - p).lpNorm<Eigen::Infinity>() > 1e-8)
    throw std::runtime_error("policy: residual ||Ap - p|| too large; no eigenvalue near 1");
  return p;
}

PerronEstimate perron_power_iteration(const CombinationPolicy& policy, double tol, int max_iters) {
  const int n = policy.size();
  if (!(tol > 0.0) || max_iters < 1)
    throw std::invalid_argument("policy: power iteration needs tol > 0 and max_iters >= 1");
  const Eigen::MatrixXd Abar =
      0.5 * (Eigen::MatrixXd::Identity(n, n) + policy.A);
  // Column k of Z is agent k's vector z_k; z_k <- sum_l abar_lk z_l is the
  // matrix product Z Abar. Diagonal entries are the local readouts.
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd prev = Z.diagonal();
  for (int i = 0; i < max_iters; ++i) {
    Z = Z * Abar;
    const Eigen::VectorXd cur = Z.diagonal();
    if ((cur - prev).lpNorm<Eigen::Infinity>() < tol)
      return {cur, i + 1};
    prev = cur;
  }
  throw std::runtime_error("policy: power iteration did not converge within max_iters");
}

PolicyValidation validate_policy(const CombinationPolicy& policy, double tol) {
  const Eigen::MatrixXd& A = policy.A;
  const Eigen::VectorXd& p = policy.perron;
  if (A.rows() != A.cols() || p.size() != A.rows())
    throw std::invalid_argument("policy: A/p dimension mismatch");
  const int n = policy.size();

  PolicyValidation v;
  v.min_entry = A.minCoeff();
  v.max_column_sum_error = (A.colwise().sum().array() - 1.0).abs().maxCoeff();
  v.left_stochastic = v.min_entry >= -tol && v.max_column_sum_error <= tol;
  v.primitive = support_strongly_connected(A) && A.trace() > 0.0;
  double res = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      res = std::max(res, std::abs(A(l, k) * p(k) - A(k, l) * p(l)));
  v.max_balance_residual = res;
  v.balanced = res <= tol;
  return v;
}

bool LemmaReport::all_pass() const {
  if (!preconditions_ok) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

LemmaReport verify_lemma_properties(const CombinationPolicy& policy) {
  LemmaReport report;
  const PolicyValidation v = validate_policy(policy);
  report.preconditions_ok = v.ok();
  if (!report.preconditions_ok) {
    std::string why;
    if (!v.left_stochastic) why += "not left-stochastic; ";
    if (!v.primitive) why += "not primitive; ";
    if (!v.balanced)
      why += "balance condition fails (max residual " +
             std::to_string(v.max_balance_residual) + "); ";
    report.precondition_detail = why;
    return report;
  }

  const int n = policy.size();
  const Eigen::MatrixXd& A = policy.A;
  const Eigen::VectorXd& p = policy.perron;
  const Eigen::MatrixXd P = p.asDiagonal();
  auto add = [&report](std::string name, bool pass, double value, std::string detail) {
    report.checks.push_back({std::move(name), pass, value, std::move(detail)});
  };

  // (a) B = AP - P + I: symmetric, nonnegative, doubly stochastic, primitive,
  // with real spectrum {1 simple, rest in (-1, 1)}.
  const Eigen::MatrixXd B = A * P - P + Eigen::MatrixXd::Identity(n, n);
  add("B_symmetric", (B - B.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12,
      (B - B.transpose()).lpNorm<Eigen::Infinity>(), "max |B - B^T|");
  add("B_nonnegative", B.minCoeff() >= -1e-12, B.minCoeff(), "min entry of B");
  const double row_err = (B.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (B.colwise().sum().array() - 1.0).abs().maxCoeff();
  add("B_doubly_stochastic", std::max(row_err, col_err) <= 1e-12,
      std::max(row_err, col_err), "max row/column sum deviation from 1");
  add("B_primitive", support_strongly_connected(B) && B.trace() > 0.0,
      B.trace(), "connected support with positive trace");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (B + B.transpose()));
    const auto& ev = eig.eigenvalues();  // ascending
    add("B_eigenvalue_one_simple",
        std::abs(ev(n - 1) - 1.0) <= 1e-10 && (n == 1 || ev(n - 2) < 1.0 - 1e-12),
        n == 1 ? 1.0 : ev(n - 2), "second-largest eigenvalue of B");
    add("B_eigenvalues_above_minus_one", ev(0) > -1.0 + 1e-12, ev(0),
        "smallest eigenvalue of B");
  }

  // (b) P - AP symmetric PSD with nullspace exactly span{1}.
  const Eigen::MatrixXd PmAP = P - A * P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (PmAP + PmAP.transpose()));
  const auto& ev = eig.eigenvalues();
  add("PmAP_psd", ev(0) >= -1e-12, ev(0), "smallest eigenvalue of P - AP");
  add("PmAP_nullspace_1d", n == 1 || ev(1) > 1e-12, n == 1 ? 1.0 : ev(1),
      "second-smallest eigenvalue of P - AP");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  add("PmAP_annihilates_ones", (PmAP * ones).lpNorm<Eigen::Infinity>() <= 1e-12,
      (PmAP * ones).lpNorm<Eigen::Infinity>(), "||(P - AP) 1||_inf");

  // (c) spectrum of A via the symmetric similarity P^{-1/2} A P^{1/2}: real,
  // inside (-1, 1], eigenvalue 1 simple.
  const Eigen::VectorXd sqrt_p = p.array().sqrt();
  const Eigen::MatrixXd S =
      sqrt_p.cwiseInverse().asDiagonal() * A * sqrt_p.asDiagonal();
  const double asym = (S - S.transpose()).lpNorm<Eigen::Infinity>();
  add("similarity_symmetric", asym <= 1e-10, asym,
      "max |S - S^T| for S = P^{-1/2} A P^{1/2}");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigA(0.5 * (S + S.transpose()));
  const auto& evA = eigA.eigenvalues();
  add("A_spectrum_real_in_unit_interval", evA(0) > -1.0 && evA(n - 1) <= 1.0 + 1e-10,
      evA(0), "smallest eigenvalue of A");
  add("A_eigenvalue_one_simple",
      std::abs(evA(n - 1) - 1.0) <= 1e-10 && (n == 1 || evA(n - 2) < 1.0 - 1e-12),
      n == 1 ? 1.0 : evA(n - 2), "second-largest eigenvalue of A");
  return report;
}

Eigen::MatrixXd square_root_V(const CombinationPolicy& policy) {
  const PolicyValidation v = validate_policy(policy);
  if (!v.balanced)
    throw std::invalid_argument(
        "policy: square_root_V needs a balanced policy ((P - AP)/2 must be symmetric PSD)");
  const int n = policy.size();
  const Eigen::MatrixXd P = policy.perron.asDiagonal();
  Eigen::MatrixXd X = 0.5 * (P - policy.A * P);
  X = 0.5 * (X + X.transpose());  // scrub roundoff asymmetry before eigensolve
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
  Eigen::VectorXd lam = eig.eigenvalues();
  for (int i = 0; i < n; ++i) {
    if (lam(i) < -1e-12)
      throw std::invalid_argument("policy: (P - AP)/2 has a negative eigenvalue; not PSD");
    // Zero-to-machine-precision eigenvalues (the consensus nullspace) must be
    // clamped on both sides: sqrt amplifies a +1e-17 residue to ~3e-9, which
    // would leak out of null(V) = span{1}.
    if (lam(i) < 1e-13) lam(i) = 0.0;
  }
  return eig.eigenvectors() * lam.array().sqrt().matrix().asDiagonal() *
         eig.eigenvectors().transpose();
}

StepSizeProfile custom_step_profile(const CombinationPolicy& policy, double mu_o,
                                    const Eigen::VectorXd& q_in) {
  const int n = policy.size();
  if (!(mu_o > 0.0)) throw std::invalid_argument("policy: mu_o must be positive");
  const Eigen::VectorXd q = ones_or(q_in, n, "q");
  require_positive(q, "q");
  if (policy.perron.size() != n || (policy.perron.array() <= 0.0).any())
    throw std::invalid_argument("policy: profile needs a positive Perron vector");
  Eigen::VectorXd mu = mu_o * q.array() / policy.perron.array();
  StepSizeProfile s;
  s.tau = mu / mu.maxCoeff();
  s.mu = std::move(mu);
  s.q = q;
  s.mu_o = mu_o;
  s.beta = 1.0 / mu_o;
  return s;
}

CombinationPolicy load_custom_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("policy: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("policy: JSON parse failure in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("A") || !j["A"].is_array())
    throw std::invalid_argument("policy: expected {\"A\": [[...]], \"p\": [...]?} in " + path);
  const auto& rows = j["A"];
  const int n = static_cast<int>(rows.size());
  if (n < 1) throw std::invalid_argument("policy: matrix must be nonempty");
  Eigen::MatrixXd A(n, n);
  for (int l = 0; l < n; ++l) {
    if (!rows[l].is_array() || static_cast<int>(rows[l].size()) != n)
      throw std::invalid_argument("policy: matrix must be square");
    for (int k = 0; k < n; ++k) A(l, k) = rows[l][k].get<double>();
  }
  if (A.minCoeff() < 0.0 || (A.colwise().sum().array() - 1.0).abs().maxCoeff() > 1e-9)
    throw std::invalid_argument("policy: matrix is not left-stochastic (columns must sum to 1)");

  CombinationPolicy policy;
  policy.A = std::move(A);
  policy.rule = CombinationRule::custom;
  if (j.contains("p")) {
    const auto& pj = j["p"];
    if (!pj.is_array() || static_cast<int>(pj.size()) != n)
      throw std::invalid_argument("policy: p has wrong length");
    Eigen::VectorXd p(n);
    for (int k = 0; k < n; ++k) p(k) = pj[k].get<double>();
    policy.perron = p;
  } else {
    policy.perron = perron_from_matrix(policy.A);
  }
  return policy;
}

}  // namespace exdiff
