#include "exdiff/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "exdiff/policy.hpp"

namespace exdiff {

namespace {

bool support_strongly_connected(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  auto reach_all = [&](bool transposed) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const double a = transposed ? A(u, v) : A(v, u);  // u -> v means a_vu > 0
        if (a > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

ErrorDynamics build_error_dynamics(const Eigen::MatrixXd& A, const Eigen::VectorXd& p,
                                   double mu, const Eigen::VectorXd& h_diag) {
  const int n = static_cast<int>(A.rows());
  if (n < 1 || A.cols() != n)
    throw std::invalid_argument("stability: A must be square and nonempty");
  if (p.size() != n || h_diag.size() != n)
    throw std::invalid_argument("stability: p and h_diag must match A's size");
  if (A.minCoeff() < -1e-12)
    throw std::invalid_argument("stability: A must be entrywise nonnegative");
  for (int k = 0; k < n; ++k)
    if (std::abs(A.col(k).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("stability: A's columns must sum to one");
  if (!(support_strongly_connected(A) && A.trace() > 0.0))
    throw std::invalid_argument("stability: A must be primitive");
  if (p.minCoeff() <= 0.0)
    throw std::invalid_argument("stability: Perron vector must be positive");
  if ((A * p - p).lpNorm<Eigen::Infinity>() > 1e-8)
    throw std::invalid_argument("stability: p is not a Perron vector of A");
  if (h_diag.minCoeff() <= 0.0)
    throw std::invalid_argument("stability: h_diag must be positive");
  if (mu < 0.0) throw std::invalid_argument("stability: mu must be nonnegative");

  const Eigen::MatrixXd Abar_t =
      0.5 * (Eigen::MatrixXd::Identity(n, n) + A).transpose();
  const Eigen::MatrixXd muD = mu * h_diag.asDiagonal();

  ErrorDynamics dyn;
  dyn.F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  dyn.F.topLeftCorner(n, n) = 2.0 * Abar_t;
  dyn.F.topRightCorner(n, n) = -Abar_t;
  dyn.F.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  dyn.G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  dyn.G.topLeftCorner(n, n) = Abar_t * muD;
  dyn.G.topRightCorner(n, n) = -Abar_t * muD;
  dyn.A = A;
  dyn.p = p;
  dyn.h_diag = h_diag;
  dyn.mu = mu;
  return dyn;
}

double spectral_radius_excluding_one(const ErrorDynamics& dyn, double exclusion_radius) {
  const Eigen::MatrixXd T = dyn.F - dyn.G;
  const long dim = T.rows();
  // Structural invariant: the consensus direction [1; 1] is fixed because
  // Abar^T (2I - muD) 1 - Abar^T (I - muD) 1 = Abar^T 1 ... with the muD
  // contributions cancelling row-wise. Verify before trusting the exclusion.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);
  const double fixed_residual = (T * ones - ones).lpNorm<Eigen::Infinity>();
  if (fixed_residual > 1e-9) {
    std::ostringstream msg;
    msg << "stability: consensus direction not fixed by F - G (residual "
        << fixed_residual << ")";
    throw std::invalid_argument(msg.str());
  }

  const Eigen::EigenSolver<Eigen::MatrixXd> es(T);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("stability: eigenvalue computation failed");

  double rho = 0.0;
  int excluded = 0;
  for (long i = 0; i < dim; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(lam - std::complex<double>(1.0, 0.0)) <= exclusion_radius) {
      ++excluded;
      continue;
    }
    rho = std::max(rho, std::abs(lam));
  }
  if (excluded == 0)
    throw std::runtime_error(
        "stability: no eigenvalue inside the structural exclusion ball");
  return rho;
}

std::vector<SweepPoint> sweep_rho(const Eigen::MatrixXd& A, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& h_diag,
                                  const std::vector<double>& mu_grid) {
  std::vector<SweepPoint> out;
  out.reserve(mu_grid.size());
  for (const double mu : mu_grid) {
    try {
      const ErrorDynamics dyn = build_error_dynamics(A, p, mu, h_diag);
      const double rho = spectral_radius_excluding_one(dyn);
      out.push_back({mu, rho, rho < 1.0});
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep at mu = " << mu << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > 0.0))
    throw std::invalid_argument("log_grid: endpoints must be positive");
  if (points < 1) throw std::invalid_argument("log_grid: need at least one point");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                 static_cast<double>(points - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

JuryVerdict jury_stability_test(const std::vector<double>& ascending) {
  const int n = static_cast<int>(ascending.size()) - 1;
  if (n < 1) throw std::invalid_argument("jury: need degree >= 1");
  if (ascending[static_cast<size_t>(n)] == 0.0)
    throw std::invalid_argument("jury: leading coefficient must be nonzero");

  // Sign-normalize so a_n > 0 (divides the polynomial by -1; roots unchanged).
  std::vector<double> a = ascending;
  if (a[static_cast<size_t>(n)] < 0.0)
    for (double& c : a) c = -c;

  JuryVerdict v;
  v.margins.reserve(static_cast<size_t>(n) + 1);

  // Condition 1: D(1) > 0.
  double d1 = 0.0;
  for (const double c : a) d1 += c;
  v.margins.push_back(d1);

  // Condition 2: (-1)^n D(-1) > 0.
  double dm1 = 0.0;
  for (int k = 0; k <= n; ++k)
    dm1 += (k % 2 == 0 ? a[static_cast<size_t>(k)] : -a[static_cast<size_t>(k)]);
  if (n % 2 != 0) dm1 = -dm1;
  v.margins.push_back(dm1);

  // Degree 1 has exactly the two endpoint conditions.
  if (n >= 2) {
    // Condition 3: |a_0| < a_n.
    v.margins.push_back(a[static_cast<size_t>(n)] - std::abs(a[0]));
  }

  // Jury table. Row 0 is a_0..a_n; each reduction maps a row of length m + 1
  // to length m via b_k = row[0] row[k] - row[m] row[m - k], with one
  // condition |b_0| > |b_{m-1}| per produced row, stopping once a row has
  // three entries. Margins are recorded for every row even after a failure.
  bool degenerate = false;
  {
    std::vector<double> row = a;
    while (row.size() > 3) {
      const size_t m = row.size() - 1;
      std::vector<double> next(m);
      for (size_t k = 0; k < m; ++k)
        next[k] = row[0] * row[k] - row[m] * row[m - k];
      bool all_zero = true;
      for (const double c : next)
        if (c != 0.0) {
          all_zero = false;
          break;
        }
      if (all_zero) {
        degenerate = true;
        break;
      }
      v.margins.push_back(std::abs(next[0]) - std::abs(next[m - 1]));
      row = std::move(next);
    }
  }

  if (degenerate) {
    v.result = JuryResult::inconclusive;
    v.failing_condition = 0;
    v.margins.clear();
    return v;
  }

  for (size_t i = 0; i < v.margins.size(); ++i) {
    if (!(v.margins[i] > 0.0)) {
      v.result = JuryResult::unstable;
      v.failing_condition = static_cast<int>(i) + 1;
      return v;
    }
  }
  v.result = JuryResult::stable;
  v.failing_condition = 0;
  return v;
}

std::array<double, 8> example1_characteristic_poly(double mu) {
  const double m2 = mu * mu;
  const double m3 = m2 * mu;
  const double m4 = m2 * m2;
  std::array<double, 8> a{};
  a[7] = 32.0;
  a[6] = 384.0 * mu - 128.0;
  a[5] = 682.0 * m2 - 1512.0 * mu + 248.0;
  a[4] = 429.0 * m3 - 2458.0 * m2 + 2712.0 * mu - 288.0;
  a[3] = 80.0 * m4 - 1346.0 * m3 + 3672.0 * m2 - 2692.0 * mu + 210.0;
  a[2] = -240.0 * m4 + 1649.0 * m3 - 2904.0 * m2 + 1593.0 * mu - 98.0;
  a[1] = 240.0 * m4 - 976.0 * m3 + 1260.0 * m2 - 552.0 * mu + 28.0;
  a[0] = -80.0 * m4 + 244.0 * m3 - 252.0 * m2 + 92.0 * mu - 4.0;
  return a;
}

StabilityExample stability_example(int id) {
  StabilityExample ex;
  if (id == 1) {
    ex.A.resize(4, 4);
    // Entry (l, k) is the weight a_{lk} agent k receives from agent l; every
    // column sums to one as written.
    ex.A << 0.0, 0.0, 0.0, 1.0,
            0.0, 0.5, 0.5, 0.0,
            1.0, 0.0, 0.5, 0.0,
            0.0, 0.5, 0.0, 0.0;
    ex.p.resize(4);
    ex.p << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
    ex.h_diag.resize(4);
    ex.h_diag << 20.0, 1.0, 1.0, 1.0;
    return ex;
  }
  if (id == 2) {
    ex.A.resize(5, 5);
    ex.A << 0.3, 0.6, 0.2, 0.0, 0.0,
            0.2, 0.2, 0.0, 0.3, 0.0,
            0.1, 0.1, 0.5, 0.3, 0.2,
            0.0, 0.1, 0.3, 0.4, 0.1,
            0.4, 0.0, 0.0, 0.0, 0.7;
    // Entry (l, k) is a_{lk}; every column sums to one as written. No closed
    // form is known for this Perron vector, so it comes from the dense solver.
    ex.p = perron_from_matrix(ex.A);
    ex.h_diag = Eigen::VectorXd::Constant(5, 10.0);
    return ex;
  }
  throw std::invalid_argument("stability_example: id must be 1 or 2");
}

}  // namespace exdiff
