#pragma once

#include "pdpiag/problem.hpp"
#include "pdpiag/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdpiag {

struct BoxSet {
  Vector lower;
  Vector upper;

  BoxSet(Vector lo, Vector hi);
  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& v) const;
  Vector project(const Vector& v) const;
  double diameter() const;

  static BoxSet centered(const Vector& center, double half_width);
};

/// Strategy for the inner max/min of the restricted gap.
///   separable_exact    - coordinatewise closed form; needs the problem's
///                        diagonal-quadratic certificate and separable h*.
///   projected_gradient - accelerated projected gradient on the primal inner
///                        problem for general smooth f; the dual inner problem
///                        still uses the separable structure of h*.
struct GapOracle {
  enum class Strategy { separable_exact, projected_gradient };
  Strategy strategy = Strategy::separable_exact;
  double tol = 1e-8;
  std::int64_t max_iters = 100000;

  static GapOracle exact() { return {Strategy::separable_exact, 0.0, 0}; }
  static GapOracle projected(double tol = 1e-8, std::int64_t max_iters = 100000) {
    return {Strategy::projected_gradient, tol, max_iters};
  }
};

struct GapResult {
  double value = 0.0;
  double achieved_tol = 0.0;  // certified bound on the value error
  bool exact = true;
  bool inexact_flagged = false;  // oracle missed its tolerance
  bool point_in_box = true;
};

/// G_{B1 x B2}(x, y) = max_{y' in B2} L(x, y') - min_{x' in B1} L(x', y).
/// Nonnegative (up to achieved_tol) whenever (x, y) lies in B1 x B2;
/// evaluation outside the boxes is allowed but flagged.
GapResult partial_gap(const SaddleProblem& problem, const BoxSet& B1, const BoxSet& B2,
                      const Vector& x, const Vector& y, const GapOracle& oracle);

/// Arithmetic means of iterates k = 1..M (the initial point is excluded).
std::pair<Vector, Vector> averaged_iterates(const ConvergenceTrace& trace, std::int64_t M);

struct SaddleCertificate {
  Vector x_hat;
  Vector y_hat;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// Analytic saddle point of f(x) = 1/2 x^T A x - b^T x, h* = gamma/2 ||y||^2:
/// x_hat = (A + K^T K / gamma)^{-1} b, y_hat = K x_hat / gamma.
SaddleCertificate saddle_quadratic(const Matrix& A, const Vector& b, const Matrix& K,
                                   double gamma);

/// First-order residuals at (x, y):
///   primal = ||grad f(x) + K^T y||
///   dual   = ||y - prox_{tau_ref h*}(y + tau_ref K x)||.
std::pair<double, double> saddle_residual(const SaddleProblem& problem, const Vector& x,
                                          const Vector& y, double tau_ref = 1.0);

struct MonitorReport {
  std::string name;
  bool pass = true;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::int64_t first_violation = -1;
  double worst_violation = 0.0;
  std::vector<std::uint8_t> ok;  // one flag per checked iteration
};

/// Default absolute tolerance for bound monitors: 1e-9 + 1e-9 |bound|.
double monitor_tolerance(double bound);

/// ||x_k - x_hat||^2/(2 sigma) + ||y_k - y_hat||^2/(2 tau) <= C * same at k=0,
/// checked at every iteration. Violations are reported, never thrown.
MonitorReport monitor_thm1_boundedness(const ConvergenceTrace& trace, double C,
                                       const SaddleCertificate& saddle, double sigma, double tau);

struct GapSeries {
  std::string name;
  bool pass = true;
  bool exact = true;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> gap;
  std::vector<double> bound;
  std::vector<double> achieved_tol;
};

/// max over the box of ||x - x0||^2/(2 sigma) + ||y - y0||^2/(2 tau),
/// attained coordinatewise at the interval endpoint farther from the anchor.
double box_distance_constant(const BoxSet& B1, const BoxSet& B2, const Vector& x0,
                             const Vector& y0, double sigma, double tau);

/// gap(xbar_M, ybar_M) <= (1/M) * box_distance_constant at each checkpoint.
GapSeries monitor_thm1_gap(const ConvergenceTrace& trace, const SaddleProblem& problem,
                           const BoxSet& B1, const BoxSet& B2, const GapOracle& oracle,
                           const Vector& x0, const Vector& y0, double sigma, double tau,
                           const std::vector<std::int64_t>& checkpoints);

/// ||y_k - y_hat||^2/(2 tau) + (1 - sigma tau ||K||^2) ||x_k - x_hat||^2/(2 sigma)
/// <= omega^k V_0 at every iteration.
MonitorReport monitor_thm2_linear(const ConvergenceTrace& trace, double omega,
                                  const SaddleCertificate& saddle, double sigma, double tau,
                                  double K_norm);

/// Same bound shape as the first theorem's gap monitor, for the
/// no-extrapolation variant.
GapSeries monitor_thm3_gap(const ConvergenceTrace& trace, const SaddleProblem& problem,
                           const BoxSet& B1, const BoxSet& B2, const GapOracle& oracle,
                           const Vector& x0, const Vector& y0, double sigma, double tau,
                           const std::vector<std::int64_t>& checkpoints);

/// Fills dist_x, dist_y and V_k on every record from a known saddle point.
void annotate_distances(ConvergenceTrace& trace, const SaddleCertificate& saddle, double sigma,
                        double tau);

/// Least-squares slope of log V_k over k, restricted to the prefix where V_k
/// stays above floor_ratio * V_0 (the floating-point floor would otherwise
/// flatten the fit). Returns NaN when fewer than two usable points exist.
double empirical_log_rate(const std::vector<double>& V, double floor_ratio = 1e-24);

/// V_k series extracted from an annotated trace.
std::vector<double> lyapunov_series(const ConvergenceTrace& trace);

}  // namespace pdpiag
