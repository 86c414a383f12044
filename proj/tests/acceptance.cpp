// Acceptance gate: one line per criterion, [PASS]/[FAIL] plus the measured
// quantities and the pinned tolerance. Exits nonzero when any criterion
// fails. Every instance is fully seeded, so the binary is deterministic.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exdiff/costs.hpp"
#include "exdiff/io.hpp"
#include "exdiff/network.hpp"
#include "exdiff/policy.hpp"
#include "exdiff/solver.hpp"
#include "exdiff/stability.hpp"
#include "oracles.hpp"

using namespace exdiff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// The 4- and 5-agent built-in combination matrices paired with scalar
// quadratics J_k(w) = p_k h_k (w - b_k)^2 / 2, realized as one-sample
// least-squares rows so that the error-dynamics diagonal P^{-1} H matches
// h_diag exactly under the mu_k = mu_o / p_k step profile.
LeastSquaresModel example_quadratic(const StabilityExample& ex, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(ex.A.rows());
  std::vector<Eigen::MatrixXd> U(static_cast<size_t>(n));
  std::vector<Eigen::VectorXd> d(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double hk = ex.p(k) * ex.h_diag(k);
    U[static_cast<size_t>(k)] = Eigen::MatrixXd::Constant(1, 1, std::sqrt(hk));
    d[static_cast<size_t>(k)] = Eigen::VectorXd::Constant(1, std::sqrt(hk) * b(k));
  }
  return LeastSquaresModel(U, d);
}

// ---------------------------------------------------------------------------
// 1. Exact convergence vs the diffusion plateau on the seeded LS instance.

Outcome criterion1() {
  const Network net = generate_random_network(20, 0.3, 42);
  const LeastSquaresModel model = generate_least_squares(20, 30, 50, 1234);
  const PolicyBuild pb = build_policy(net, CombinationRule::averaging, 0.01);

  RunConfig cfg;
  cfg.algorithm = Algorithm::exact_diffusion;
  cfg.max_iters = 20000;
  cfg.stop_rel_error = 1e-10;
  const Trajectory exact = run(pb.policy, pb.steps, model, cfg);

  cfg.algorithm = Algorithm::diffusion;
  cfg.stop_rel_error.reset();
  const Trajectory diff = run(pb.policy, pb.steps, model, cfg);
  const double diff_plateau = plateau(diff.rel_error);

  const bool pass = !exact.diverged && exact.rel_error.back() < 1e-10 &&
                    exact.iterations <= 20000 && !diff.diverged && diff_plateau > 1e-7;
  std::ostringstream os;
  os << "exact diffusion rel-err " << num(exact.rel_error.back()) << " after "
     << exact.iterations << " iters (need < 1e-10 within 20000); diffusion plateau "
     << num(diff_plateau) << " (need > 1e-7)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 2. Quadratic bias law: halving mu_o shrinks the diffusion plateau ~4x.

Outcome criterion2() {
  const Network net = generate_random_network(20, 0.3, 42);
  const LeastSquaresModel model = generate_least_squares(20, 30, 50, 1234);
  RunConfig cfg;
  cfg.algorithm = Algorithm::diffusion;
  cfg.max_iters = 40000;

  const PolicyBuild hi = build_policy(net, CombinationRule::averaging, 0.004);
  const PolicyBuild lo = build_policy(net, CombinationRule::averaging, 0.002);
  const Trajectory t_hi = run(hi.policy, hi.steps, model, cfg);
  const Trajectory t_lo = run(lo.policy, lo.steps, model, cfg);
  const double ratio = plateau(t_hi.rel_error) / plateau(t_lo.rel_error);

  const bool pass = !t_hi.diverged && !t_lo.diverged && ratio >= 3.0 && ratio <= 5.0;
  std::ostringstream os;
  os << "plateau(mu_o=0.004)/plateau(mu_o=0.002) = " << num(ratio) << " (need within [3, 5])";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 3. Spectral radius of the 5-agent case at mu = 1e-9.

Outcome criterion3() {
  const StabilityExample ex = stability_example(2);
  const ErrorDynamics dyn = build_error_dynamics(ex.A, ex.p, 1e-9, ex.h_diag);
  const double rho = spectral_radius_excluding_one(dyn);
  const bool pass = std::abs(rho - 0.9923) <= 5e-4;
  std::ostringstream os;
  os << "rho(mu=1e-9) = " << num(rho) << " (need 0.9923 +- 5e-4)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 4. The 4-agent case is unstable everywhere; the solver mirrors the theory.

Outcome criterion4() {
  const StabilityExample ex = stability_example(1);
  const std::vector<SweepPoint> sweep =
      sweep_rho(ex.A, ex.p, ex.h_diag, log_grid(1e-6, 3.0, 300));
  int unstable = 0;
  double min_rho = 1e300;
  for (const SweepPoint& pt : sweep) {
    if (pt.rho > 1.0) ++unstable;
    min_rho = std::min(min_rho, pt.rho);
  }

  CombinationPolicy pol;
  pol.A = ex.A;
  pol.perron = ex.p;
  pol.rule = CombinationRule::custom;
  Eigen::VectorXd b(4);
  b << 1.0, -2.0, 3.0, 0.5;
  const LeastSquaresModel model = example_quadratic(ex, b);
  const StepSizeProfile steps = custom_step_profile(pol, 0.01);

  RunConfig cfg;
  cfg.algorithm = Algorithm::exact_diffusion;
  cfg.max_iters = 20000;
  const Trajectory exact = run(pol, steps, model, cfg);
  cfg.algorithm = Algorithm::diffusion;
  const Trajectory diff = run(pol, steps, model, cfg);
  const double diff_plateau = diff.rel_error.empty() ? 1e300 : plateau(diff.rel_error);

  const bool pass = unstable == 300 && exact.diverged && !diff.diverged &&
                    diff_plateau > 1e-8 && diff_plateau < 1e-2;
  std::ostringstream os;
  os << unstable << "/300 grid points have rho > 1 (min rho " << num(min_rho)
     << ", need all); exact diffusion diverged=" << (exact.diverged ? "yes" : "no")
     << " at iter " << exact.divergence_iter << " (need yes); diffusion plateau "
     << num(diff_plateau) << " (need biased: within (1e-8, 1e-2))";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 5. The 5-agent case: stable below 0.19, unstable by [0.2, 0.3]; solver
//    converges exactly at mu = 0.001.

Outcome criterion5() {
  const StabilityExample ex = stability_example(2);
  const std::vector<SweepPoint> sweep =
      sweep_rho(ex.A, ex.p, ex.h_diag, log_grid(1e-6, 3.0, 300));
  bool all_below_stable = true;
  bool unstable_in_window = false;
  for (const SweepPoint& pt : sweep) {
    if (pt.mu < 0.19 && pt.rho >= 1.0) all_below_stable = false;
    if (pt.mu >= 0.2 && pt.mu <= 0.3 && pt.rho >= 1.0) unstable_in_window = true;
  }

  CombinationPolicy pol;
  pol.A = ex.A;
  pol.perron = ex.p;
  pol.rule = CombinationRule::custom;
  Eigen::VectorXd b(5);
  b << 1.0, -1.0, 2.0, 0.0, 0.5;
  const LeastSquaresModel model = example_quadratic(ex, b);
  const StepSizeProfile steps = custom_step_profile(pol, 0.001);

  RunConfig cfg;
  cfg.algorithm = Algorithm::exact_diffusion;
  cfg.max_iters = 20000;
  cfg.stop_rel_error = 1e-10;
  const Trajectory t = run(pol, steps, model, cfg);

  const bool pass = all_below_stable && unstable_in_window && !t.diverged &&
                    t.rel_error.back() <= 1e-10;
  std::ostringstream os;
  os << "rho < 1 for all grid mu < 0.19: " << (all_below_stable ? "yes" : "NO")
     << "; rho >= 1 in [0.2, 0.3]: " << (unstable_in_window ? "yes" : "NO")
     << "; solver rel-err " << num(t.rel_error.back()) << " after " << t.iterations
     << " iters at mu=0.001 (need <= 1e-10)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Jury criterion: oracle agreement, blanket instability of the degree-7
//    polynomial, D(1) = 25 mu, and the published condition boundaries.

Outcome criterion6() {
  // (a) >= 50 random polynomials vs the companion-matrix oracle
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> mag_in(0.0, 0.95);
  std::uniform_real_distribution<double> mag_out(1.05, 1.8);
  std::uniform_real_distribution<double> angle(0.1, M_PI - 0.1);
  std::uniform_int_distribution<int> degree_dist(2, 6);
  std::bernoulli_distribution outside(0.35);
  std::bernoulli_distribution make_pair(0.5);

  int agree = 0;
  const int total = 60;
  for (int t = 0; t < total; ++t) {
    const int degree = degree_dist(gen);
    std::vector<std::complex<double>> roots;
    while (static_cast<int>(roots.size()) < degree) {
      const double m = outside(gen) ? mag_out(gen) : mag_in(gen);
      if (make_pair(gen) && static_cast<int>(roots.size()) + 2 <= degree) {
        const double th = angle(gen);
        roots.emplace_back(m * std::cos(th), m * std::sin(th));
        roots.emplace_back(m * std::cos(th), -m * std::sin(th));
      } else {
        roots.emplace_back(gen() % 2 == 0 ? m : -m, 0.0);
      }
    }
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
      std::vector<std::complex<double>> next(c.size() + 1, 0.0);
      for (size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= r * c[i];
      }
      c = std::move(next);
    }
    std::vector<double> a(c.size());
    for (size_t i = 0; i < c.size(); ++i) a[i] = c[i].real();

    bool expect_stable = true;
    for (const auto& r : roots) expect_stable = expect_stable && std::abs(r) < 1.0;
    const JuryVerdict v = jury_stability_test(a);
    if (v.result != JuryResult::inconclusive &&
        (v.result == JuryResult::stable) == expect_stable &&
        oracle::all_roots_inside_unit_circle(a) == expect_stable)
      ++agree;
  }

  // (b) instability across a 1000-point grid over (0, 3] and (c) D(1) = 25 mu
  int grid_unstable = 0;
  int d1_ok = 0;
  const int grid_n = 1000;
  for (int j = 1; j <= grid_n; ++j) {
    const double mu = 3.0 * j / grid_n;
    const std::array<double, 8> a = example1_characteristic_poly(mu);
    const JuryVerdict v = jury_stability_test(std::vector<double>(a.begin(), a.end()));
    if (v.result == JuryResult::unstable) ++grid_unstable;
    double d1 = 0.0;
    for (const double coef : a) d1 += coef;
    if (std::abs(d1 - 25.0 * mu) <= 1e-9 * std::abs(25.0 * mu)) ++d1_ok;
  }

  // (d) condition boundaries via sign changes of the per-condition margins
  auto margin = [](double mu, int condition) {
    const std::array<double, 8> a = example1_characteristic_poly(mu);
    const JuryVerdict v = jury_stability_test(std::vector<double>(a.begin(), a.end()));
    return v.margins.at(static_cast<size_t>(condition - 1));
  };
  const std::vector<std::pair<double, int>> boundaries{
      {0.1265, 2}, {3.0410, 2}, {-0.1884, 3}, {1.6323, 3},
      {0.0438, 7}, {0.1265, 7}, {0.0412, 8}};
  int flips = 0;
  std::string missed;
  for (const auto& [b, cond] : boundaries) {
    if (margin(b - 0.001, cond) * margin(b + 0.001, cond) < 0.0) {
      ++flips;
    } else {
      missed += " " + num(b) + "(cond " + std::to_string(cond) + ")";
    }
  }

  const bool pass = agree == total && grid_unstable == grid_n && d1_ok == grid_n &&
                    flips == static_cast<int>(boundaries.size());
  std::ostringstream os;
  os << agree << "/" << total << " oracle agreements (need all); " << grid_unstable << "/"
     << grid_n << " grid points unstable (need all); D(1)=25mu to 1e-9 rel at " << d1_ok
     << "/" << grid_n << " points; " << flips << "/" << boundaries.size()
     << " boundary sign flips within +-0.001";
  if (!missed.empty()) os << " (missed:" << missed << ")";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Algebraic equivalences, iterate by iterate, over 20 random configs.

Outcome criterion7() {
  const std::vector<CombinationRule> rules{
      CombinationRule::hastings, CombinationRule::averaging, CombinationRule::relative_degree,
      CombinationRule::metropolis, CombinationRule::max_degree};
  double worst_dp = 0.0;   // diffusion vs penalized incremental, per iteration
  double worst_epd = 0.0;  // exact diffusion vs primal-dual, over 200 iterations
  int configs = 0;
  for (int seed = 0; seed < 4; ++seed) {
    for (size_t ri = 0; ri < rules.size(); ++ri) {
      const int idx = seed * 5 + static_cast<int>(ri);
      const int n = 3 + idx % 6;
      const int m = 1 + (seed + static_cast<int>(ri)) % 4;
      const Network net = generate_random_network(n, 0.6, 100 + static_cast<std::uint64_t>(idx));
      const LeastSquaresModel model =
          generate_least_squares(n, m, m + 3, 50 + static_cast<std::uint64_t>(seed));
      const PolicyBuild pb = build_policy(net, rules[ri], 0.02);
      const Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(n, m);

      SolverWorkspace wd = make_workspace(Algorithm::diffusion, pb.policy, pb.steps);
      SolverWorkspace wp = make_workspace(Algorithm::penalized_incremental, pb.policy, pb.steps);
      SolverWorkspace we = make_workspace(Algorithm::exact_diffusion, pb.policy, pb.steps);
      SolverWorkspace wv = make_workspace(Algorithm::primal_dual, pb.policy, pb.steps);
      SolverState sd = make_state(Algorithm::diffusion, W0);
      SolverState sp = make_state(Algorithm::penalized_incremental, W0);
      SolverState se = make_state(Algorithm::exact_diffusion, W0);
      SolverState sv = make_state(Algorithm::primal_dual, W0);
      for (int it = 0; it < 200; ++it) {
        step(sd, wd, model);
        step(sp, wp, model);
        step(se, we, model);
        step(sv, wv, model);
        worst_dp = std::max(worst_dp, (sd.W - sp.W).cwiseAbs().maxCoeff());
        worst_epd = std::max(worst_epd, (se.W - sv.W).cwiseAbs().maxCoeff());
      }
      ++configs;
    }
  }
  const bool pass = configs >= 20 && worst_dp <= 1e-12 && worst_epd <= 1e-10;
  std::ostringstream os;
  os << configs << " configs; max |diffusion - penalized| = " << num(worst_dp)
     << " (need <= 1e-12/iter); max |exact - primal-dual| = " << num(worst_epd)
     << " (need <= 1e-10 over 200 iters)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Structural consequences of local balance for the four generating rules.

Outcome criterion8() {
  const std::vector<CombinationRule> rules{
      CombinationRule::hastings, CombinationRule::averaging, CombinationRule::relative_degree,
      CombinationRule::metropolis};
  double worst_colsum = 0.0, worst_balance = 0.0, worst_bsym = 0.0, worst_bstoch = 0.0;
  double worst_bneg = 0.0, worst_psd = 0.0, worst_imag = 0.0, worst_identity = 0.0;
  double min_eigA = 1e300, max_eigA = -1e300;
  int bad_null = 0;
  int graphs = 0;
  for (const CombinationRule rule : rules) {
    for (int s = 0; s < 10; ++s) {
      const int n = 5 + s % 6;
      const Network net = generate_random_network(n, 0.5, 200 + static_cast<std::uint64_t>(s));
      const PolicyBuild pb = build_policy(net, rule, 0.01);
      const Eigen::MatrixXd& A = pb.policy.A;
      const Eigen::VectorXd& p = pb.policy.perron;
      const Eigen::MatrixXd P = p.asDiagonal();

      worst_colsum = std::max(
          worst_colsum, (A.colwise().sum().transpose() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd AP = A * P;
      worst_balance = std::max(worst_balance,
                               (AP - AP.transpose()).cwiseAbs().maxCoeff());

      const Eigen::MatrixXd B = AP - P + Eigen::MatrixXd::Identity(n, n);
      worst_bsym = std::max(worst_bsym, (B - B.transpose()).cwiseAbs().maxCoeff());
      worst_bstoch = std::max(
          worst_bstoch, (B.colwise().sum().transpose() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
      worst_bstoch = std::max(
          worst_bstoch, (B.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff());
      worst_bneg = std::max(worst_bneg, std::max(0.0, -B.minCoeff()));

      const Eigen::MatrixXd S = 0.5 * ((P - AP) + (P - AP).transpose());
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(S);
      worst_psd = std::max(worst_psd, std::max(0.0, -sa.eigenvalues()(0)));
      int null_dim = 0;
      for (int i = 0; i < n; ++i)
        if (std::abs(sa.eigenvalues()(i)) < 1e-12) ++null_dim;
      if (null_dim != 1) ++bad_null;

      const Eigen::EigenSolver<Eigen::MatrixXd> es(A);
      for (int i = 0; i < n; ++i) {
        worst_imag = std::max(worst_imag, std::abs(es.eigenvalues()(i).imag()));
        min_eigA = std::min(min_eigA, es.eigenvalues()(i).real());
        max_eigA = std::max(max_eigA, es.eigenvalues()(i).real());
      }

      worst_identity = std::max(
          worst_identity,
          (pb.steps.q - pb.steps.beta * pb.steps.mu.cwiseProduct(p).eval()).cwiseAbs().maxCoeff());
      ++graphs;
    }
  }
  const bool pass = graphs == 40 && worst_colsum <= 1e-12 && worst_balance <= 1e-10 &&
                    worst_bsym <= 1e-10 && worst_bstoch <= 1e-10 && worst_bneg <= 1e-12 &&
                    worst_psd <= 1e-12 && bad_null == 0 && worst_imag <= 1e-9 &&
                    min_eigA > -1.0 && max_eigA <= 1.0 + 1e-12 && worst_identity <= 1e-12;
  std::ostringstream os;
  os << graphs << " rule/graph pairs; col-sum err " << num(worst_colsum)
     << " (<= 1e-12); balance residual " << num(worst_balance) << " (<= 1e-10); B sym/stoch/neg "
     << num(worst_bsym) << "/" << num(worst_bstoch) << "/" << num(worst_bneg)
     << "; min eig(P-AP) >= -" << num(worst_psd) << " (<= 1e-12), bad nullspaces " << bad_null
     << "; eig(A) real to " << num(worst_imag) << " in [" << num(min_eigA) << ", "
     << num(max_eigA) << "] (need (-1, 1]); q = beta diag(mu) p err " << num(worst_identity)
     << " (<= 1e-12)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 9. Decentralized Perron learning: convergence and the positivity bound.

Outcome criterion9() {
  const std::vector<CombinationRule> rules{
      CombinationRule::hastings, CombinationRule::averaging, CombinationRule::relative_degree,
      CombinationRule::metropolis};
  double worst_err = 0.0;
  int bound_violations = 0;
  for (const CombinationRule rule : rules) {
    for (int s = 0; s < 3; ++s) {
      const int n = 5 + 2 * s;
      const Network net = generate_random_network(n, 0.5, 300 + static_cast<std::uint64_t>(s));
      const PolicyBuild pb = build_policy(net, rule, 0.01);

      const PerronEstimate est = perron_power_iteration(pb.policy, 1e-12, 200000);
      worst_err = std::max(worst_err, (est.p - pb.policy.perron).cwiseAbs().maxCoeff());

      // positivity bound on the diagonal readouts along the whole run
      const Eigen::MatrixXd Abar =
          0.5 * (Eigen::MatrixXd::Identity(n, n) + pb.policy.A);
      Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
      for (int i = 0; i < 300; ++i) {
        Z = Z * Abar;
        for (int k = 0; k < n; ++k) {
          const double bound = std::pow(Abar(k, k), i + 1);
          if (Z(k, k) < bound * (1.0 - 1e-12)) ++bound_violations;
        }
      }
    }
  }
  const bool pass = worst_err <= 1e-8 && bound_violations == 0;
  std::ostringstream os;
  os << "max |readout - closed form| = " << num(worst_err)
     << " (need <= 1e-8); positivity-bound violations " << bound_violations << " (need 0)";
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------
// 10. Unbalanced-topology speedup: averaging vs Metropolis, each at its best
//     mu_o from a 10-point grid bracketing its own stable range.

Outcome criterion10() {
  const Network net = generate_unbalanced_network(2, 18);
  const LeastSquaresModel model = generate_least_squares(20, 5, 15, 777);
  auto best_iters = [&](CombinationRule rule, double lo, double hi) {
    long best = -1;
    double best_mu = 0.0;
    for (const double mu_o : log_grid(lo, hi, 10)) {
      const PolicyBuild pb = build_policy(net, rule, mu_o);
      RunConfig cfg;
      cfg.algorithm = Algorithm::exact_diffusion;
      cfg.max_iters = 30000;
      cfg.stop_rel_error = 1e-8;
      const Trajectory t = run(pb.policy, pb.steps, model, cfg);
      if (!t.diverged && !t.rel_error.empty() && t.rel_error.back() <= 1e-8 &&
          (best < 0 || t.iterations < best)) {
        best = t.iterations;
        best_mu = mu_o;
      }
    }
    return std::make_pair(best, best_mu);
  };
  const auto [avg_iters, avg_mu] = best_iters(CombinationRule::averaging, 1e-3, 0.15);
  const auto [met_iters, met_mu] = best_iters(CombinationRule::metropolis, 1e-5, 2e-3);

  const bool pass = avg_iters > 0 && met_iters > 0 && 2 * avg_iters <= met_iters;
  std::ostringstream os;
  os << "averaging best " << avg_iters << " iters (mu_o " << num(avg_mu) << "), metropolis best "
     << met_iters << " iters (mu_o " << num(met_mu)
     << ") to rel-err 1e-8 (need averaging <= half)";
  return {pass, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact convergence vs diffusion plateau (seeded LS instance)", criterion1},
      {"quadratic bias law, plateau ratio in [3, 5]", criterion2},
      {"spectral radius 0.9923 at mu = 1e-9 (5-agent case)", criterion3},
      {"4-agent case: rho > 1 on the whole grid and solver divergence", criterion4},
      {"5-agent case: stability boundary and exact convergence", criterion5},
      {"jury criterion: oracle agreement, blanket instability, boundaries", criterion6},
      {"algebraic equivalences across 20 random configs", criterion7},
      {"combination-policy structure suite (4 rules x 10 graphs)", criterion8},
      {"decentralized Perron learning accuracy and positivity", criterion9},
      {"unbalanced-topology speedup, averaging vs metropolis", criterion10},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("[%s] criterion %zu: %s — %s\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), out.detail.c_str());
  }
  if (failures == 0)
    std::printf("all %zu criteria passed\n", criteria.size());
  else
    std::printf("%d of %zu criteria FAILED\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
