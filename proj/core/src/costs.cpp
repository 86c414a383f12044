#include "exdiff/costs.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace exdiff {

namespace {

// Cache-free Box-Muller (cosine branch): every variate consumes exactly two
// 53-bit uniforms, so the generator position is a pure function of the number
// of variates drawn - that is what makes the documented draw orders exact.
double standard_normal(std::mt19937_64& gen) {
  const double u1 = 1.0 - (gen() >> 11) * 0x1.0p-53;  // (0, 1], log-safe
  const double u2 = (gen() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform01(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

// ln(1 + exp(x)) without overflow for large |x|.
double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

Eigen::VectorXd ones_or(const Eigen::VectorXd& v, int n) {
  if (v.size() == 0) return Eigen::VectorXd::Ones(n);
  if (v.size() != n) throw std::invalid_argument("costs: weight vector has wrong length");
  return v;
}

// Upper bound on the spectral norm of X^T X via a few power-iteration steps
// with a safety margin.
double spectral_norm_bound(const Eigen::MatrixXd& X) {
  if (X.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(X.cols()).normalized();
  double lam = 0.0;
  for (int i = 0; i < 60; ++i) {
    Eigen::VectorXd u = X.transpose() * (X * v);
    lam = u.norm();
    if (lam == 0.0) return 0.0;
    v = u / lam;
  }
  return 1.1 * lam;
}

}  // namespace

Eigen::MatrixXd CostModel::gradient_all(const Eigen::MatrixXd& W) const {
  if (W.rows() != agents() || W.cols() != dim())
    throw std::invalid_argument("costs: stacked iterate has wrong shape");
  Eigen::MatrixXd G(W.rows(), W.cols());
  for (int k = 0; k < agents(); ++k) G.row(k) = gradient(k, W.row(k)).transpose();
  return G;
}

double CostModel::total_value(const Eigen::VectorXd& w, const Eigen::VectorXd& q_in) const {
  const Eigen::VectorXd q = ones_or(q_in, agents());
  double total = 0.0;
  for (int k = 0; k < agents(); ++k) total += q(k) * value(k, w);
  return total;
}

LeastSquaresModel::LeastSquaresModel(std::vector<Eigen::MatrixXd> U,
                                     std::vector<Eigen::VectorXd> d)
    : U_(std::move(U)), d_(std::move(d)) {
  if (U_.empty() || U_.size() != d_.size())
    throw std::invalid_argument("costs: need matching nonempty U and d lists");
  for (size_t k = 0; k < U_.size(); ++k)
    if (U_[k].cols() != U_[0].cols() || U_[k].rows() != d_[k].size())
      throw std::invalid_argument("costs: inconsistent least-squares shapes");
}

double LeastSquaresModel::value(int k, const Eigen::VectorXd& w) const {
  return 0.5 * (U_.at(k) * w - d_.at(k)).squaredNorm();
}

Eigen::VectorXd LeastSquaresModel::gradient(int k, const Eigen::VectorXd& w) const {
  return U_.at(k).transpose() * (U_.at(k) * w - d_.at(k));
}

Eigen::MatrixXd LeastSquaresModel::hessian(int k, const Eigen::VectorXd&) const {
  return U_.at(k).transpose() * U_.at(k);
}

LogisticModel::LogisticModel(std::vector<Eigen::MatrixXd> H, std::vector<Eigen::VectorXd> y,
                             double rho)
    : H_(std::move(H)), y_(std::move(y)), rho_(rho) {
  if (H_.empty() || H_.size() != y_.size())
    throw std::invalid_argument("costs: need matching nonempty feature and label lists");
  if (!(rho_ > 0.0)) throw std::invalid_argument("costs: rho must be positive");
  for (size_t k = 0; k < H_.size(); ++k) {
    if (H_[k].cols() != H_[0].cols() || H_[k].rows() != y_[k].size())
      throw std::invalid_argument("costs: inconsistent logistic shapes");
    if (((y_[k].array() != 1.0) && (y_[k].array() != -1.0)).any())
      throw std::invalid_argument("costs: labels must be +1 or -1");
  }
}

double LogisticModel::value(int k, const Eigen::VectorXd& w) const {
  const Eigen::MatrixXd& H = H_.at(k);
  const Eigen::VectorXd& y = y_.at(k);
  const Eigen::VectorXd margins = (H * w).cwiseProduct(y);
  double sum = 0.0;
  for (int j = 0; j < margins.size(); ++j) sum += log1p_exp(-margins(j));
  return sum / static_cast<double>(margins.size()) + 0.5 * rho_ * w.squaredNorm();
}

Eigen::VectorXd LogisticModel::gradient(int k, const Eigen::VectorXd& w) const {
  const Eigen::MatrixXd& H = H_.at(k);
  const Eigen::VectorXd& y = y_.at(k);
  const int L = static_cast<int>(y.size());
  Eigen::VectorXd coeff(L);  // -y_j * sigmoid(-y_j h_j^T w) / L
  const Eigen::VectorXd z = H * w;
  for (int j = 0; j < L; ++j) coeff(j) = -y(j) * sigmoid(-y(j) * z(j)) / L;
  return H.transpose() * coeff + rho_ * w;
}

Eigen::MatrixXd LogisticModel::hessian(int k, const Eigen::VectorXd& w) const {
  const Eigen::MatrixXd& H = H_.at(k);
  const Eigen::VectorXd& y = y_.at(k);
  const int L = static_cast<int>(y.size());
  const Eigen::VectorXd z = H * w;
  Eigen::VectorXd s(L);  // sigmoid'(margin) / L, label sign squares away
  for (int j = 0; j < L; ++j) {
    const double sig = sigmoid(-y(j) * z(j));
    s(j) = sig * (1.0 - sig) / L;
  }
  return H.transpose() * s.asDiagonal() * H +
         rho_ * Eigen::MatrixXd::Identity(H.cols(), H.cols());
}

LeastSquaresModel generate_least_squares(int agents, int dim, int samples,
                                         std::uint64_t seed) {
  if (agents < 1 || dim < 1 || samples < 1)
    throw std::invalid_argument("costs: sizes must be at least 1");
  std::mt19937_64 gen(seed);
  std::vector<Eigen::MatrixXd> U(agents);
  std::vector<Eigen::VectorXd> d(agents);
  for (int k = 0; k < agents; ++k) {
    U[k].resize(samples, dim);
    for (int i = 0; i < samples; ++i)
      for (int j = 0; j < dim; ++j) U[k](i, j) = standard_normal(gen);
    d[k].resize(samples);
    for (int i = 0; i < samples; ++i) d[k](i) = standard_normal(gen);
  }
  return LeastSquaresModel(std::move(U), std::move(d));
}

LogisticModel generate_logistic(int agents, int dim, int samples, double rho,
                                std::uint64_t seed, const Eigen::VectorXd* w0_override) {
  if (agents < 1 || dim < 1 || samples < 1)
    throw std::invalid_argument("costs: sizes must be at least 1");
  if (!(rho > 0.0)) throw std::invalid_argument("costs: rho must be positive");
  std::mt19937_64 gen(seed);
  Eigen::VectorXd w0(dim);
  for (int j = 0; j < dim; ++j) w0(j) = standard_normal(gen);
  if (w0_override) {
    if (w0_override->size() != dim)
      throw std::invalid_argument("costs: w0 override has wrong length");
    w0 = *w0_override;  // labeling rule only; the draw above keeps the stream fixed
  }
  const double sd = std::sqrt(10.0);  // N(0, 10 I): variance 10 per coordinate
  std::vector<Eigen::MatrixXd> H(agents);
  std::vector<Eigen::VectorXd> y(agents);
  for (int k = 0; k < agents; ++k) {
    H[k].resize(samples, dim);
    for (int i = 0; i < samples; ++i)
      for (int j = 0; j < dim; ++j) H[k](i, j) = sd * standard_normal(gen);
    y[k].resize(samples);
    for (int i = 0; i < samples; ++i) {
      const double u = uniform01(gen);
      y[k](i) = u <= sigmoid(H[k].row(i).dot(w0)) ? 1.0 : -1.0;
    }
  }
  return LogisticModel(std::move(H), std::move(y), rho);
}

Eigen::VectorXd global_minimizer(const CostModel& model, const Eigen::VectorXd& q_in) {
  const int n = model.agents();
  const int m = model.dim();
  const Eigen::VectorXd q = ones_or(q_in, n);

  if (const auto* ls = dynamic_cast<const LeastSquaresModel*>(&model)) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < n; ++k) {
      H += q(k) * (ls->U(k).transpose() * ls->U(k));
      b += q(k) * (ls->U(k).transpose() * ls->d(k));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw std::runtime_error("costs: weighted normal matrix is not positive definite");
    return ldlt.solve(b);
  }

  // Fixed-step gradient descent: step = 1 / sum_k q_k L_k with L_k an upper
  // bound on ||Hess J_k||; logistic losses bound by ||H^T H|| / (4 L) + rho.
  double lipschitz = 0.0;
  if (const auto* lr = dynamic_cast<const LogisticModel*>(&model)) {
    for (int k = 0; k < n; ++k) {
      const double L = static_cast<double>(lr->labels(k).size());
      lipschitz += q(k) * (spectral_norm_bound(lr->features(k)) / (4.0 * L) + lr->rho());
    }
  } else {
    const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < n; ++k)
      lipschitz += q(k) * 1.1 * model.hessian(k, w0).norm();
  }
  if (!(lipschitz > 0.0)) throw std::runtime_error("costs: no usable smoothness bound");
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  constexpr int kMaxIters = 1000000;
  for (int i = 0; i < kMaxIters; ++i) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < n; ++k) g += q(k) * model.gradient(k, w);
    if (g.norm() <= 1e-12) return w;
    w -= step * g;
  }
  throw std::runtime_error("costs: centralized solver hit its iteration cap");
}

void save_least_squares(const LeastSquaresModel& model, const std::string& path) {
  nlohmann::json j;
  j["type"] = "least_squares";
  auto Us = nlohmann::json::array();
  auto ds = nlohmann::json::array();
  for (int k = 0; k < model.agents(); ++k) {
    auto Uk = nlohmann::json::array();
    for (int i = 0; i < model.U(k).rows(); ++i) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < model.U(k).cols(); ++c) row.push_back(model.U(k)(i, c));
      Uk.push_back(row);
    }
    Us.push_back(Uk);
    auto dk = nlohmann::json::array();
    for (int i = 0; i < model.d(k).size(); ++i) dk.push_back(model.d(k)(i));
    ds.push_back(dk);
  }
  j["U"] = Us;
  j["d"] = ds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("costs: cannot write " + path);
  out << j.dump() << "\n";
}

void save_logistic(const LogisticModel& model, const std::string& path) {
  nlohmann::json j;
  j["type"] = "logistic";
  j["rho"] = model.rho();
  auto Hs = nlohmann::json::array();
  auto ys = nlohmann::json::array();
  for (int k = 0; k < model.agents(); ++k) {
    auto Hk = nlohmann::json::array();
    for (int i = 0; i < model.features(k).rows(); ++i) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < model.features(k).cols(); ++c)
        row.push_back(model.features(k)(i, c));
      Hk.push_back(row);
    }
    Hs.push_back(Hk);
    auto yk = nlohmann::json::array();
    for (int i = 0; i < model.labels(k).size(); ++i) yk.push_back(model.labels(k)(i));
    ys.push_back(yk);
  }
  j["H"] = Hs;
  j["y"] = ys;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("costs: cannot write " + path);
  out << j.dump() << "\n";
}

namespace {

std::vector<Eigen::MatrixXd> parse_matrices(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw std::invalid_argument(std::string("costs: ") + what + " must be a nonempty array");
  std::vector<Eigen::MatrixXd> out;
  for (const auto& mk : arr) {
    if (!mk.is_array() || mk.empty() || !mk[0].is_array())
      throw std::invalid_argument(std::string("costs: ") + what + " entries must be 2-D arrays");
    const int rows = static_cast<int>(mk.size());
    const int cols = static_cast<int>(mk[0].size());
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
      if (static_cast<int>(mk[i].size()) != cols)
        throw std::invalid_argument(std::string("costs: ragged rows in ") + what);
      for (int c = 0; c < cols; ++c) M(i, c) = mk[i][c].get<double>();
    }
    out.push_back(std::move(M));
  }
  return out;
}

std::vector<Eigen::VectorXd> parse_vectors(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw std::invalid_argument(std::string("costs: ") + what + " must be a nonempty array");
  std::vector<Eigen::VectorXd> out;
  for (const auto& vk : arr) {
    if (!vk.is_array())
      throw std::invalid_argument(std::string("costs: ") + what + " entries must be arrays");
    Eigen::VectorXd v(vk.size());
    for (int i = 0; i < v.size(); ++i) v(i) = vk[i].get<double>();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::unique_ptr<CostModel> load_cost_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("costs: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("costs: JSON parse failure in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("type"))
    throw std::invalid_argument("costs: dataset file needs a \"type\" field");
  try {
    const std::string type = j["type"].get<std::string>();
    if (type == "least_squares") {
      return std::make_unique<LeastSquaresModel>(parse_matrices(j.at("U"), "U"),
                                                 parse_vectors(j.at("d"), "d"));
    }
    if (type == "logistic") {
      return std::make_unique<LogisticModel>(parse_matrices(j.at("H"), "H"),
                                             parse_vectors(j.at("y"), "y"),
                                             j.at("rho").get<double>());
    }
    throw std::invalid_argument("costs: unknown dataset type: " + type);
  } catch (const nlohmann::json::exception& e) {
    // missing keys / wrong value types surface as one malformed-input error
    throw std::invalid_argument("costs: malformed dataset in " + path + ": " + e.what());
  }
}

}  // namespace exdiff
