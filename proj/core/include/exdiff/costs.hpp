#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace exdiff {

// Sum-of-agents objective J(w) = sum_k q_k J_k(w) over a shared w in R^M.
// Implementations must be deterministic and side-effect free.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual int agents() const = 0;
  virtual int dim() const = 0;

  virtual double value(int k, const Eigen::VectorXd& w) const = 0;
  virtual Eigen::VectorXd gradient(int k, const Eigen::VectorXd& w) const = 0;

  // Hessian of J_k at w; every built-in model provides it (least squares:
  // constant U_k^T U_k; logistic: sample average + ridge term).
  virtual Eigen::MatrixXd hessian(int k, const Eigen::VectorXd& w) const = 0;

  // Stacked gradient: row k of the result is grad J_k evaluated at row k of
  // W (both N x M).
  Eigen::MatrixXd gradient_all(const Eigen::MatrixXd& W) const;

  // sum_k q_k J_k(w).
  double total_value(const Eigen::VectorXd& w, const Eigen::VectorXd& q) const;
};

// J_k(w) = 1/2 ||U_k w - d_k||^2 with U_k (S_k x M), d_k (S_k).
class LeastSquaresModel : public CostModel {
 public:
  LeastSquaresModel(std::vector<Eigen::MatrixXd> U, std::vector<Eigen::VectorXd> d);

  int agents() const override { return static_cast<int>(U_.size()); }
  int dim() const override { return static_cast<int>(U_.empty() ? 0 : U_[0].cols()); }
  double value(int k, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd gradient(int k, const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hessian(int k, const Eigen::VectorXd& w) const override;

  const Eigen::MatrixXd& U(int k) const { return U_.at(k); }
  const Eigen::VectorXd& d(int k) const { return d_.at(k); }

 private:
  std::vector<Eigen::MatrixXd> U_;
  std::vector<Eigen::VectorXd> d_;
};

// J_k(w) = (1/L_k) sum_j ln(1 + exp(-y_kj h_kj^T w)) + (rho/2) ||w||^2 with
// features h_kj (rows of H_k, L_k x M) and labels y_kj in {-1, +1}.
class LogisticModel : public CostModel {
 public:
  LogisticModel(std::vector<Eigen::MatrixXd> H, std::vector<Eigen::VectorXd> y, double rho);

  int agents() const override { return static_cast<int>(H_.size()); }
  int dim() const override { return static_cast<int>(H_.empty() ? 0 : H_[0].cols()); }
  double value(int k, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd gradient(int k, const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hessian(int k, const Eigen::VectorXd& w) const override;

  double rho() const { return rho_; }
  const Eigen::MatrixXd& features(int k) const { return H_.at(k); }
  const Eigen::VectorXd& labels(int k) const { return y_.at(k); }

 private:
  std::vector<Eigen::MatrixXd> H_;
  std::vector<Eigen::VectorXd> y_;
  double rho_ = 0.0;
};

// Deterministic synthetic data. Both generators drive a mt19937_64 seeded
// with `seed` through a fixed draw order (documented per generator), using a
// cache-free Box-Muller transform (two 53-bit uniforms per normal variate) so
// the stream position depends only on how many variates were drawn. Same
// seed -> bit-identical data.

// Draw order: for each agent k = 0..N-1 in turn, the S x M entries of U_k
// row-major, then the S entries of d_k; all standard normal.
LeastSquaresModel generate_least_squares(int agents, int dim, int samples,
                                         std::uint64_t seed);

// Draw order: the M entries of a hidden w_0 (standard normal), then for each
// agent k the L x M feature entries row-major (normal with variance 10), then
// L uniforms u in [0,1). Label +1 iff u <= 1/(1 + exp(-h^T w_0)), else -1.
// `w0_override` replaces the hidden w_0 in the labeling rule only (the w_0
// draws still happen, so the feature stream is unchanged) - a test hook, e.g.
// w_0 = 0 gives Bernoulli(1/2) labels.
LogisticModel generate_logistic(int agents, int dim, int samples, double rho,
                                std::uint64_t seed,
                                const Eigen::VectorXd* w0_override = nullptr);

// Minimizer of sum_k q_k J_k: weighted normal equations (LDLT) for least
// squares; otherwise gradient descent with fixed step 1/(sum_k q_k L_k),
// where L_k upper-bounds the spectral norm of Hess J_k, run to
// ||sum_k q_k grad J_k|| <= 1e-12 (cap 1e6 iterations). q defaults to
// all-ones. Throws std::runtime_error if the tolerance is not reached.
Eigen::VectorXd global_minimizer(const CostModel& model,
                                 const Eigen::VectorXd& q = Eigen::VectorXd());

// JSON dump/load for small datasets (cross-implementation regression
// fixtures). Least squares: {"type": "least_squares", "U": [[[...]]],
// "d": [[...]]}. Logistic: {"type": "logistic", "rho": r, "H": [[[...]]],
// "y": [[...]]}. load_cost_model dispatches on "type"; throws
// std::invalid_argument on malformed input.
void save_least_squares(const LeastSquaresModel& model, const std::string& path);
void save_logistic(const LogisticModel& model, const std::string& path);
std::unique_ptr<CostModel> load_cost_model(const std::string& path);

}  // namespace exdiff
