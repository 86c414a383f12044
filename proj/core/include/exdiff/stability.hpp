#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace exdiff {

// Linearized error dynamics of the exact-diffusion recursion around a fixed
// point, for scalar per-agent quadratics (M = 1) with step matrix mu P^{-1}:
// the error state [w~_i; w~_{i-1}] evolves by F - G with
//
//   F = [ 2 Abar^T   -Abar^T ]        G = [ Abar^T mu D   -Abar^T mu D ]
//       [   I           0    ]            [     0               0      ]
//
// where Abar = (I + A)/2 and D = diag(h_diag) = P^{-1} H. Both blocks are
// N x N, so F and G are 2N x 2N.
struct ErrorDynamics {
  Eigen::MatrixXd F;
  Eigen::MatrixXd G;
  Eigen::MatrixXd A;       // combination matrix the dynamics were built from
  Eigen::VectorXd p;       // its Perron vector
  Eigen::VectorXd h_diag;  // diagonal of P^{-1} H
  double mu = 0.0;

  int agents() const { return static_cast<int>(A.rows()); }
};

// Validates (A primitive left-stochastic, p its positive Perron vector,
// h_diag > 0, mu >= 0) and assembles F and G. Throws std::invalid_argument
// on contract violations.
ErrorDynamics build_error_dynamics(const Eigen::MatrixXd& A, const Eigen::VectorXd& p,
                                   double mu, const Eigen::VectorXd& h_diag);

// Spectral radius of F - G with the structural unit eigenvalue removed.
//
// F - G always keeps the consensus direction [1; 1] fixed (row identity
// (F - G)[1; 1] = [1; 1], a consequence of Abar's columns summing to one);
// that eigenvalue says nothing about stability and is excluded. Concretely:
// the row identity is verified to 1e-9 (throws std::invalid_argument
// otherwise), every eigenvalue with |lambda - 1| <= exclusion_radius is
// dropped (the structural one, plus its coalescing consensus partner in the
// mu -> 0 regime where the pair is numerically indistinguishable), and the
// maximum modulus of the remainder is returned. Throws std::runtime_error if
// no eigenvalue falls inside the exclusion ball.
double spectral_radius_excluding_one(const ErrorDynamics& dyn,
                                     double exclusion_radius = 1e-7);

struct SweepPoint {
  double mu = 0.0;
  double rho = 0.0;
  bool stable = false;  // rho < 1
};

// Evaluates spectral_radius_excluding_one over mu_grid. Failures at a grid
// point propagate as exceptions annotated with the offending mu.
std::vector<SweepPoint> sweep_rho(const Eigen::MatrixXd& A, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& h_diag,
                                  const std::vector<double>& mu_grid);

// Log-spaced grid of `points` values from lo to hi inclusive (lo, hi > 0).
std::vector<double> log_grid(double lo, double hi, int points);

enum class JuryResult { stable, unstable, inconclusive };

struct JuryVerdict {
  JuryResult result = JuryResult::inconclusive;
  // 1-based index of the first violated condition; 0 when stable or
  // inconclusive. Conditions for degree n: (1) D(1) > 0,
  // (2) (-1)^n D(-1) > 0, (3) |a_0| < a_n (n >= 2 only), then one per Jury
  // table row as the rows shrink to three entries, (n+1) total.
  int failing_condition = 0;
  // margins[i] is the quantity condition i+1 requires to be positive:
  // D(1), (-1)^n D(-1), a_n - |a_0|, then |row_0| - |row_last| per table row.
  // Always fully evaluated (even past a failed condition) so boundary
  // locations can be read off sign changes; empty only when a degenerate
  // all-zero row stopped the table.
  std::vector<double> margins;
};

// Jury test: all roots of D(z) = sum_k a_k z^k strictly inside the unit
// circle? `ascending` holds a_0..a_n with a_n != 0 (the whole polynomial is
// sign-normalized so the leading coefficient is positive; roots are
// unaffected). An all-zero Jury table row makes the verdict inconclusive.
// Throws std::invalid_argument for degree < 1 or a zero leading coefficient.
JuryVerdict jury_stability_test(const std::vector<double>& ascending);

// Degree-7 factor of the characteristic polynomial of F - G for the 4-agent
// built-in case (stability_example(1)): det(lambda I - (F - G)) =
// (lambda - 1) D(lambda) / a_7 with D's coefficients returned ascending
// (a_0..a_7, a_7 = 32). Every coefficient is polynomial in mu.
std::array<double, 8> example1_characteristic_poly(double mu);

struct StabilityExample {
  Eigen::MatrixXd A;
  Eigen::VectorXd p;       // dense-eigensolver Perron vector of A
  Eigen::VectorXd h_diag;  // P^{-1} H diagonal paired with the example
};

// Built-in study cases for the error dynamics:
//   1: 4 agents, P^{-1}H = diag(20, 1, 1, 1) - unstable for every mu > 0;
//   2: 5 agents, P^{-1}H = 10 I - stable for mu < 0.19, unstable past 0.2.
// Throws std::invalid_argument for any other id.
StabilityExample stability_example(int id);

}  // namespace exdiff
