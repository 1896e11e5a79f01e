#include "pdpiag/certificates.hpp"

#include <cmath>

namespace pdpiag {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::thm1: return "thm1";
    case Variant::thm2: return "thm2";
    case Variant::thm3: return "thm3";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "thm1") return Variant::thm1;
  if (name == "thm2") return Variant::thm2;
  if (name == "thm3") return Variant::thm3;
  throw std::invalid_argument("unknown variant: " + name);
}

namespace {

ConditionCheck make_check(std::string name, double lhs, double rhs, bool strict) {
  ConditionCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.strict = strict;
  c.slack = rhs - lhs;
  c.satisfied = strict ? (lhs < rhs) : (lhs <= rhs);
  return c;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

bool StepSizeCertificate::satisfied() const {
  for (const auto& c : checks) {
    if (!c.satisfied) return false;
  }
  return true;
}

double StepSizeCertificate::min_slack() const {
  double s = kInf;
  for (const auto& c : checks) s = std::min(s, c.slack);
  return s;
}

const ConditionCheck* StepSizeCertificate::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

StepSizeCertificate certify_thm1(double sigma, double tau, double K_norm, double L, int T) {
  require_positive(sigma, "sigma");
  require_positive(tau, "tau");
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  StepSizeCertificate cert;
  cert.variant = Variant::thm1;
  cert.sigma = sigma;
  cert.tau = tau;
  cert.T = T;
  cert.K_norm = K_norm;
  cert.L = L;
  double Tp1 = static_cast<double>(T) + 1.0;
  double lhs = std::sqrt(tau * sigma) * K_norm + sigma * L * Tp1 * Tp1;
  cert.checks.push_back(make_check("step_condition", lhs, 1.0, /*strict=*/true));
  cert.checks.push_back(make_check("C_defined", tau * sigma * K_norm * K_norm, 1.0, true));
  return cert;
}

double compute_C(double sigma, double tau, double K_norm) {
  double p = tau * sigma * K_norm * K_norm;
  if (!(p < 1.0)) throw std::invalid_argument("compute_C: tau*sigma*||K||^2 must be < 1");
  return 1.0 / (1.0 - p);
}

std::pair<double, double> theta_range(double sigma, double tau, double delta, double gamma) {
  require_positive(sigma, "sigma");
  require_positive(tau, "tau");
  if (!(delta > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("theta_range: requires delta > 0 and gamma > 0");
  }
  double m = std::min(1.5 * delta * sigma, 2.0 * gamma * tau);
  return {1.0 / (m + 1.0), 1.0};
}

RateConstants compute_a_omega(double theta, double sigma, double tau, double delta, double gamma,
                              double K_norm, double L, int T) {
  auto [theta_min, theta_max] = theta_range(sigma, tau, delta, gamma);
  if (theta < theta_min || theta > theta_max) {
    throw std::invalid_argument("compute_a_omega: theta outside the certified range");
  }
  RateConstants rc;
  rc.theta_min = theta_min;
  rc.a = 1.0 / std::min(1.0 + 1.5 * delta * sigma, 1.0 + 2.0 * gamma * tau);
  rc.omega = rc.a * (1.0 + theta * sigma * K_norm) / (1.0 + rc.a * sigma * K_norm);
  rc.C1 = (L + delta) * (static_cast<double>(T) + 1.0);
  double p = tau * sigma * K_norm * K_norm;
  if (p < 1.0) rc.C = 1.0 / (1.0 - p);
  if (!(rc.a <= rc.omega && rc.omega <= theta)) {
    throw std::logic_error("compute_a_omega: a <= omega <= theta violated");
  }
  return rc;
}

StepSizeCertificate certify_thm2(double sigma, double tau, double theta, double delta,
                                 double gamma, double L, int T, double K_norm) {
  require_positive(sigma, "sigma");
  require_positive(tau, "tau");
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  StepSizeCertificate cert;
  cert.variant = Variant::thm2;
  cert.sigma = sigma;
  cert.tau = tau;
  cert.theta = theta;
  cert.T = T;
  cert.K_norm = K_norm;
  cert.L = L;
  cert.delta = delta;
  cert.gamma = gamma;

  if (!(delta > 0.0) || !(gamma > 0.0)) {
    // Theorem inapplicable; record the failing preconditions as checks.
    cert.checks.push_back(make_check("delta_positive", 0.0, delta, true));
    cert.checks.push_back(make_check("gamma_positive", 0.0, gamma, true));
    return cert;
  }

  auto [theta_min, theta_max] = theta_range(sigma, tau, delta, gamma);
  bool theta_in_range = theta >= theta_min && theta <= theta_max;
  ConditionCheck range_check = make_check("theta_range", theta_min, theta, false);
  range_check.satisfied = theta_in_range;
  range_check.slack = std::min(theta - theta_min, theta_max - theta);
  cert.checks.push_back(range_check);

  // a^-T = min{1 + 3 delta sigma / 2, 1 + 2 gamma tau}^T
  double a_inv = std::min(1.0 + 1.5 * delta * sigma, 1.0 + 2.0 * gamma * tau);
  double Tp1 = static_cast<double>(T) + 1.0;
  double conda_lhs = sigma * (L + delta) * Tp1 * std::pow(a_inv, T) + sigma * K_norm;
  cert.checks.push_back(make_check("conda", conda_lhs, 1.0, false));
  cert.checks.push_back(make_check("condb", sigma * tau * K_norm * K_norm, 1.0, true));
  cert.checks.push_back(make_check("condc", theta * tau * K_norm, 1.0, false));
  return cert;
}

StepSizeCertificate certify_thm3(double sigma, double tau, double L, int T, double K_norm,
                                 double delta) {
  require_positive(sigma, "sigma");
  require_positive(tau, "tau");
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  StepSizeCertificate cert;
  cert.variant = Variant::thm3;
  cert.sigma = sigma;
  cert.tau = tau;
  cert.T = T;
  cert.K_norm = K_norm;
  cert.L = L;
  cert.delta = delta;
  double Tp1 = static_cast<double>(T) + 1.0;
  // Stated as 1 - sigma L (T+1)^2 < 0 in the source; the surrounding argument
  // needs this coefficient nonnegative, so the corrected sign is enforced.
  cert.checks.push_back(make_check("step_condition", sigma * L * Tp1 * Tp1, 1.0, true));
  cert.checks.push_back(make_check("coupling_condition", K_norm * K_norm * tau, delta, false));
  cert.checks.push_back(make_check("C_defined", tau * sigma * K_norm * K_norm, 1.0, true));
  return cert;
}

Lemma1Report lemma1_verify(const std::vector<double>& V, const std::vector<double>& omega_seq,
                           double a, double b, double c, int k0, double tol) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("lemma1_verify: a must be in (0,1)");
  if (b < 0.0 || c < 0.0) throw std::invalid_argument("lemma1_verify: b, c must be >= 0");
  if (k0 < 1) throw std::invalid_argument("lemma1_verify: k0 must be >= 1");
  if (V.size() != omega_seq.size()) {
    throw std::invalid_argument("lemma1_verify: sequence length mismatch");
  }
  const int n = static_cast<int>(V.size());
  Lemma1Report report;
  report.hypothesis_ok = true;
  report.conclusion_ok = true;

  for (int k = 0; k + 1 < n; ++k) {
    double window = 0.0;
    for (int j = k - k0; j <= k; ++j) {
      if (j >= 0) window += omega_seq[static_cast<std::size_t>(j)];
    }
    double rhs = V[static_cast<std::size_t>(k + 1)] / a + b * omega_seq[static_cast<std::size_t>(k)] - c * window;
    double violation = rhs - V[static_cast<std::size_t>(k)];
    double scale = std::abs(V[static_cast<std::size_t>(k)]) + std::abs(V[static_cast<std::size_t>(k + 1)]) + 1.0;
    if (violation > tol * scale) {
      report.hypothesis_ok = false;
      report.worst_hypothesis_violation =
          std::max(report.worst_hypothesis_violation, violation);
    }
  }

  double cond_lhs = (c / (1.0 - a)) * (1.0 - std::pow(a, k0 + 1)) / std::pow(a, k0);
  report.condition_ok = cond_lhs <= b;

  double decay = 1.0;  // a^k
  for (int k = 0; k < n; ++k) {
    double bound = decay * V[0];
    double violation = V[static_cast<std::size_t>(k)] - bound;
    double scale = std::abs(bound) + 1.0;
    if (violation > tol * scale) {
      report.conclusion_ok = false;
      report.worst_conclusion_violation =
          std::max(report.worst_conclusion_violation, violation);
    }
    decay *= a;
  }
  return report;
}

AutoStepResult auto_stepsize(double L, double delta, double gamma, double K_norm, int T,
                             Variant variant, double sigma_tau_ratio) {
  require_positive(sigma_tau_ratio, "sigma_tau_ratio");
  if (variant == Variant::thm2 && (!(delta > 0.0) || !(gamma > 0.0))) {
    throw infeasible_error("auto_stepsize: Theorem 2 requires delta > 0 and gamma > 0");
  }
  if (variant == Variant::thm3 && !(delta > 0.0)) {
    throw infeasible_error("auto_stepsize: Theorem 3 requires delta > 0");
  }
  double s = 1.0 / (L + K_norm + 1.0);
  for (int halving = 0; halving < 60; ++halving, s *= 0.5) {
    double sigma = sigma_tau_ratio * s;
    double tau = s;
    AutoStepResult result;
    result.sigma = sigma;
    result.tau = tau;
    switch (variant) {
      case Variant::thm1:
        result.certificate = certify_thm1(sigma, tau, K_norm, L, T);
        break;
      case Variant::thm2: {
        auto [theta_min, theta_max] = theta_range(sigma, tau, delta, gamma);
        result.theta = 0.5 * (theta_min + theta_max);
        result.certificate = certify_thm2(sigma, tau, *result.theta, delta, gamma, L, T, K_norm);
        break;
      }
      case Variant::thm3:
        result.certificate = certify_thm3(sigma, tau, L, T, K_norm, delta);
        break;
    }
    if (result.certificate.satisfied()) return result;
  }
  throw infeasible_error("auto_stepsize: no feasible parameters after 60 halvings");
}

AutoStepResult auto_stepsize(const SaddleProblem& problem, int T, Variant variant,
                             double sigma_tau_ratio) {
  return auto_stepsize(problem.L(), problem.delta(), problem.gamma(), problem.K_norm(), T,
                       variant, sigma_tau_ratio);
}

}  // namespace pdpiag
