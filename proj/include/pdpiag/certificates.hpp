#pragma once

#include "pdpiag/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdpiag {

enum class Variant { thm1, thm2, thm3 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ConditionCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = false;  // strict: lhs < rhs; otherwise lhs <= rhs
  bool satisfied = false;
  double slack = 0.0;  // rhs - lhs
};

/// Admissibility record for one theorem's step-size conditions. A failed
/// certificate is a value, not an error; it keeps the exact inputs it was
/// evaluated with so the verdict is auditable.
struct StepSizeCertificate {
  Variant variant = Variant::thm1;
  double sigma = 0.0;
  double tau = 0.0;
  std::optional<double> theta;
  int T = 0;
  double K_norm = 0.0;
  double L = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  std::vector<ConditionCheck> checks;

  bool satisfied() const;
  double min_slack() const;
  const ConditionCheck* find(const std::string& name) const;
};

/// Rate constants of the linear-convergence regime. C and C1 are carried
/// along because the monitors need them next to a and omega.
struct RateConstants {
  double a = 0.0;
  double omega = 0.0;
  double theta_min = 0.0;
  double C = std::numeric_limits<double>::quiet_NaN();  // (1 - tau sigma ||K||^2)^-1
  double C1 = 0.0;                                      // (L + delta)(T + 1)
};

/// sqrt(tau sigma) ||K|| + sigma L (T+1)^2 < 1, plus tau sigma ||K||^2 < 1
/// so the boundedness constant C is defined.
StepSizeCertificate certify_thm1(double sigma, double tau, double K_norm, double L, int T);

/// C = (1 - tau sigma ||K||^2)^-1. Throws when the product reaches 1.
double compute_C(double sigma, double tau, double K_norm);

/// Admissible extrapolation range [theta_min, 1] with
/// theta_min = (min{3 delta sigma / 2, 2 gamma tau} + 1)^-1.
/// Requires delta > 0 and gamma > 0.
std::pair<double, double> theta_range(double sigma, double tau, double delta, double gamma);

/// a = min{1 + 3 delta sigma / 2, 1 + 2 gamma tau}^-1 and
/// omega = a (1 + theta sigma ||K||) / (1 + a sigma ||K||).
/// Enforces a <= omega <= theta; L and T only feed the C1 field.
RateConstants compute_a_omega(double theta, double sigma, double tau, double delta, double gamma,
                              double K_norm, double L = 0.0, int T = 0);

/// Conditions (a) sigma (L+delta)(T+1) a^-T + sigma ||K|| <= 1,
/// (b) sigma tau ||K||^2 < 1, (c) theta tau ||K|| <= 1, plus the theta range.
StepSizeCertificate certify_thm2(double sigma, double tau, double theta, double delta,
                                 double gamma, double L, int T, double K_norm);

/// Conditions 1 - sigma L (T+1)^2 > 0 and ||K||^2 tau <= delta, plus
/// tau sigma ||K||^2 < 1 so the boundedness constant is defined.
StepSizeCertificate certify_thm3(double sigma, double tau, double L, int T, double K_norm,
                                 double delta);

struct Lemma1Report {
  bool hypothesis_ok = false;
  bool condition_ok = false;
  bool conclusion_ok = false;
  double worst_hypothesis_violation = 0.0;
  double worst_conclusion_violation = 0.0;
};

/// Checks, for given sequences {V_k} and nonnegative {omega_k} (omega_k = 0
/// for k < 0), whether
///   V_k >= (1/a) V_{k+1} + b omega_k - c sum_{j=k-k0}^{k} omega_j
/// holds for all k, whether (c/(1-a)) (1-a^{k0+1})/a^{k0} <= b, and whether
/// V_k <= a^k V_0. The three verdicts are independent; a small tolerance
/// absorbs floating-point accumulation.
Lemma1Report lemma1_verify(const std::vector<double>& V, const std::vector<double>& omega_seq,
                           double a, double b, double c, int k0, double tol = 1e-9);

class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AutoStepResult {
  double sigma = 0.0;
  double tau = 0.0;
  std::optional<double> theta;
  StepSizeCertificate certificate;
};

/// Halves a common scale s starting at 1/(L + ||K|| + 1) with sigma = ratio*s,
/// tau = s until the selected theorem's certificate passes. For Theorem 2 the
/// extrapolation weight is the midpoint of [theta_min, 1]. Throws
/// infeasible_error after 60 halvings or when the theorem is inapplicable.
AutoStepResult auto_stepsize(const SaddleProblem& problem, int T, Variant variant,
                             double sigma_tau_ratio = 1.0);

/// Same search on bare constants, for callers without a constructed problem.
AutoStepResult auto_stepsize(double L, double delta, double gamma, double K_norm, int T,
                             Variant variant, double sigma_tau_ratio = 1.0);

}  // namespace pdpiag
