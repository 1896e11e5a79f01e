#include "pdpiag/analysis.hpp"

#include <cmath>

namespace pdpiag {

BoxSet::BoxSet(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw std::invalid_argument("BoxSet: dimension mismatch");
  for (int j = 0; j < lower.size(); ++j) {
    if (!(lower[j] <= upper[j])) throw std::invalid_argument("BoxSet: lower > upper");
  }
}

bool BoxSet::contains(const Vector& v) const {
  if (v.size() != lower.size()) return false;
  return (v.array() >= lower.array()).all() && (v.array() <= upper.array()).all();
}

Vector BoxSet::project(const Vector& v) const {
  return v.array().max(lower.array()).min(upper.array());
}

double BoxSet::diameter() const { return (upper - lower).norm(); }

BoxSet BoxSet::centered(const Vector& center, double half_width) {
  return BoxSet(center.array() - half_width, center.array() + half_width);
}

namespace {

// min over [lo, hi] of a/2 t^2 + q t
double scalar_quadratic_min(double a, double q, double lo, double hi) {
  auto value = [&](double t) { return 0.5 * a * t * t + q * t; };
  if (a > 0.0) {
    double t = std::clamp(-q / a, lo, hi);
    return value(t);
  }
  return std::min(value(lo), value(hi));
}

// max over [lo, hi] of p t - gamma/2 t^2
double scalar_quadratic_max(double p, double gamma, double lo, double hi) {
  auto value = [&](double t) { return p * t - 0.5 * gamma * t * t; };
  if (gamma > 0.0) {
    double t = std::clamp(p / gamma, lo, hi);
    return value(t);
  }
  return std::max(value(lo), value(hi));
}

// max over y' in B2 of <p, y'> - h*(y'), exact through the separable
// structure of h*. Returns -inf when B2 misses the domain of h*.
double dual_inner_max(const DualStructure& dual, const BoxSet& B2, const Vector& p) {
  double total = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    double lo = B2.lower[j];
    double hi = B2.upper[j];
    switch (dual.kind) {
      case DualKind::quadratic:
        total += scalar_quadratic_max(p[j], dual.gamma, lo, hi);
        break;
      case DualKind::zero:
        total += scalar_quadratic_max(p[j], 0.0, lo, hi);
        break;
      case DualKind::box: {
        double l = std::max(lo, -dual.lambda);
        double h = std::min(hi, dual.lambda);
        if (l > h) return -kInf;
        total += scalar_quadratic_max(p[j], 0.0, l, h);
        break;
      }
      case DualKind::point_zero:
        if (lo > 0.0 || hi < 0.0) return -kInf;
        break;  // y'_j = 0 contributes nothing
    }
  }
  return total;
}

// min over x' in B1 of f(x') + <q, x'> for the diagonal-quadratic structure.
double primal_inner_min_exact(const SeparableQuadraticF& f, const BoxSet& B1, const Vector& q) {
  double total = 0.0;
  for (int j = 0; j < q.size(); ++j) {
    total += scalar_quadratic_min(f.diag[j], q[j] - f.lin[j], B1.lower[j], B1.upper[j]);
  }
  return total;
}

struct InnerMinResult {
  double value = 0.0;
  double achieved_tol = 0.0;
  bool hit_tol = true;
};

// Accelerated projected gradient for min over B1 of f(x') + <q, x'>.
// The gradient-mapping norm at the returned point certifies the value error
// (convexity: phi(x+) - phi* <= ||G|| * diam).
InnerMinResult primal_inner_min_pg(const SaddleProblem& problem, const BoxSet& B1,
                                   const Vector& q, double tol, std::int64_t max_iters) {
  const double Lf = std::max(problem.L(), 1e-12);
  const double diam = std::max(B1.diameter(), 1e-12);
  const double target_residual = tol / diam;

  auto grad = [&](const Vector& v) { return Vector(grad_full(problem, v) + q); };
  auto value = [&](const Vector& v) {
    double fv = 0.0;
    for (const auto& c : problem.components()) fv += c.value(v);
    return fv + q.dot(v);
  };

  Vector x = B1.project(Vector(0.5 * (B1.lower + B1.upper)));
  Vector x_prev = x;
  Vector z = x;
  double t = 1.0;
  double residual = kInf;
  for (std::int64_t it = 0; it < max_iters; ++it) {
    Vector g = grad(z);
    Vector x_next = B1.project(Vector(z - g / Lf));
    x_prev = x;
    x = x_next;
    // gradient mapping at the accepted point
    residual = Lf * (x - B1.project(Vector(x - grad(x) / Lf))).norm();
    if (residual <= target_residual) {
      return {value(x), residual * diam, true};
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
  }
  return {value(x), residual * diam, false};
}

}  // namespace

GapResult partial_gap(const SaddleProblem& problem, const BoxSet& B1, const BoxSet& B2,
                      const Vector& x, const Vector& y, const GapOracle& oracle) {
  if (B1.dim() != problem.d1() || B2.dim() != problem.d2()) {
    throw std::invalid_argument("partial_gap: box dimensions disagree with the problem");
  }
  if (x.size() != problem.d1() || y.size() != problem.d2()) {
    throw std::invalid_argument("partial_gap: point dimensions disagree with the problem");
  }
  if (!problem.dual_structure) {
    throw std::invalid_argument("partial_gap: problem does not certify a separable h*");
  }

  GapResult result;
  result.point_in_box = B1.contains(x) && B2.contains(y);

  double fx = 0.0;
  for (const auto& c : problem.components()) fx += c.value(x);
  double max_side = fx + dual_inner_max(*problem.dual_structure, B2, problem.coupling().forward(x));

  double hstar_y = problem.conjugate().value(y);
  if (hstar_y == kInf) {
    result.value = kInf;
    return result;
  }

  Vector q = problem.coupling().adjoint(y);
  double min_side;
  if (oracle.strategy == GapOracle::Strategy::separable_exact) {
    if (!problem.f_structure) {
      throw std::invalid_argument(
          "partial_gap: exact oracle needs the diagonal-quadratic certificate");
    }
    min_side = primal_inner_min_exact(*problem.f_structure, B1, q) - hstar_y;
    result.exact = true;
    result.achieved_tol = 0.0;
  } else {
    InnerMinResult inner = primal_inner_min_pg(problem, B1, q, oracle.tol, oracle.max_iters);
    min_side = inner.value - hstar_y;
    result.exact = false;
    result.achieved_tol = inner.achieved_tol;
    result.inexact_flagged = !inner.hit_tol;
  }

  result.value = max_side - min_side;
  return result;
}

std::pair<Vector, Vector> averaged_iterates(const ConvergenceTrace& trace, std::int64_t M) {
  if (M < 1 || static_cast<std::size_t>(M) >= trace.records.size()) {
    throw std::invalid_argument("averaged_iterates: M exceeds the recorded iterations");
  }
  Vector x_bar = Vector::Zero(trace.records.front().x.size());
  Vector y_bar = Vector::Zero(trace.records.front().y.size());
  for (std::int64_t k = 1; k <= M; ++k) {
    x_bar += trace.records[static_cast<std::size_t>(k)].x;
    y_bar += trace.records[static_cast<std::size_t>(k)].y;
  }
  double inv = 1.0 / static_cast<double>(M);
  return {Vector(x_bar * inv), Vector(y_bar * inv)};
}

SaddleCertificate saddle_quadratic(const Matrix& A, const Vector& b, const Matrix& K,
                                   double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("saddle_quadratic: gamma must be positive");
  if (A.rows() != A.cols() || A.rows() != b.size() || K.cols() != A.rows()) {
    throw std::invalid_argument("saddle_quadratic: dimension mismatch");
  }
  Matrix system = A + K.transpose() * K / gamma;
  Eigen::LDLT<Matrix> ldlt(system);
  if (ldlt.info() != Eigen::Success) {
    throw std::invalid_argument("saddle_quadratic: system factorization failed");
  }
  Vector x_hat = ldlt.solve(b);
  double solve_residual = (system * x_hat - b).norm();
  if (!(solve_residual <= 1e-8 * (1.0 + b.norm()))) {
    throw std::invalid_argument("saddle_quadratic: singular or ill-conditioned system");
  }
  SaddleCertificate cert;
  cert.x_hat = x_hat;
  cert.y_hat = K * x_hat / gamma;
  cert.primal_residual = (A * x_hat - b + K.transpose() * cert.y_hat).norm();
  // dual optimality as a prox fixed point at tau_ref = 1
  Vector prox_arg = cert.y_hat + K * x_hat;
  cert.dual_residual = (cert.y_hat - prox_arg / (1.0 + gamma)).norm();
  return cert;
}

std::pair<double, double> saddle_residual(const SaddleProblem& problem, const Vector& x,
                                          const Vector& y, double tau_ref) {
  if (!(tau_ref > 0.0)) throw std::invalid_argument("saddle_residual: tau_ref must be positive");
  double primal = (grad_full(problem, x) + problem.coupling().adjoint(y)).norm();
  Vector prox_arg = y + tau_ref * problem.coupling().forward(x);
  double dual = (y - apply_prox(problem.conjugate(), tau_ref, prox_arg)).norm();
  return {primal, dual};
}

double monitor_tolerance(double bound) { return 1e-9 + 1e-9 * std::abs(bound); }

namespace {

double lyapunov(const TraceRecord& rec, const SaddleCertificate& saddle, double sigma,
                double tau) {
  return (rec.x - saddle.x_hat).squaredNorm() / (2.0 * sigma) +
         (rec.y - saddle.y_hat).squaredNorm() / (2.0 * tau);
}

void note_violation(MonitorReport& report, std::int64_t k, double violation) {
  report.pass = false;
  ++report.violations;
  if (report.first_violation < 0) report.first_violation = k;
  report.worst_violation = std::max(report.worst_violation, violation);
}

}  // namespace

MonitorReport monitor_thm1_boundedness(const ConvergenceTrace& trace, double C,
                                       const SaddleCertificate& saddle, double sigma,
                                       double tau) {
  MonitorReport report;
  report.name = "thm1_boundedness";
  if (trace.records.empty()) return report;
  double V0 = lyapunov(trace.records.front(), saddle, sigma, tau);
  double bound = C * V0;
  double tol = monitor_tolerance(bound);
  report.ok.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    double lhs = lyapunov(rec, saddle, sigma, tau);
    bool ok = lhs <= bound + tol;
    report.ok.push_back(ok ? 1 : 0);
    ++report.checks;
    if (!ok) note_violation(report, rec.k, lhs - bound);
  }
  return report;
}

double box_distance_constant(const BoxSet& B1, const BoxSet& B2, const Vector& x0,
                             const Vector& y0, double sigma, double tau) {
  double sx = 0.0;
  for (int j = 0; j < B1.dim(); ++j) {
    double lo = B1.lower[j] - x0[j];
    double hi = B1.upper[j] - x0[j];
    sx += std::max(lo * lo, hi * hi);
  }
  double sy = 0.0;
  for (int j = 0; j < B2.dim(); ++j) {
    double lo = B2.lower[j] - y0[j];
    double hi = B2.upper[j] - y0[j];
    sy += std::max(lo * lo, hi * hi);
  }
  return sx / (2.0 * sigma) + sy / (2.0 * tau);
}

namespace {

GapSeries gap_bound_series(const char* name, const ConvergenceTrace& trace,
                           const SaddleProblem& problem, const BoxSet& B1, const BoxSet& B2,
                           const GapOracle& oracle, const Vector& x0, const Vector& y0,
                           double sigma, double tau,
                           const std::vector<std::int64_t>& checkpoints) {
  GapSeries series;
  series.name = name;
  double constant = box_distance_constant(B1, B2, x0, y0, sigma, tau);
  for (std::int64_t M : checkpoints) {
    if (M < 1 || static_cast<std::size_t>(M) >= trace.records.size()) continue;
    auto [x_bar, y_bar] = averaged_iterates(trace, M);
    GapResult gap = partial_gap(problem, B1, B2, x_bar, y_bar, oracle);
    double bound = constant / static_cast<double>(M);
    series.checkpoints.push_back(M);
    series.gap.push_back(gap.value);
    series.bound.push_back(bound);
    series.achieved_tol.push_back(gap.achieved_tol);
    if (!gap.exact) series.exact = false;
    double tol = monitor_tolerance(bound) + gap.achieved_tol;
    if (!(gap.value <= bound + tol)) series.pass = false;
    if (gap.inexact_flagged) series.exact = false;
  }
  return series;
}

}  // namespace

GapSeries monitor_thm1_gap(const ConvergenceTrace& trace, const SaddleProblem& problem,
                           const BoxSet& B1, const BoxSet& B2, const GapOracle& oracle,
                           const Vector& x0, const Vector& y0, double sigma, double tau,
                           const std::vector<std::int64_t>& checkpoints) {
  return gap_bound_series("thm1_gap", trace, problem, B1, B2, oracle, x0, y0, sigma, tau,
                          checkpoints);
}

GapSeries monitor_thm3_gap(const ConvergenceTrace& trace, const SaddleProblem& problem,
                           const BoxSet& B1, const BoxSet& B2, const GapOracle& oracle,
                           const Vector& x0, const Vector& y0, double sigma, double tau,
                           const std::vector<std::int64_t>& checkpoints) {
  return gap_bound_series("thm3_gap", trace, problem, B1, B2, oracle, x0, y0, sigma, tau,
                          checkpoints);
}

MonitorReport monitor_thm2_linear(const ConvergenceTrace& trace, double omega,
                                  const SaddleCertificate& saddle, double sigma, double tau,
                                  double K_norm) {
  MonitorReport report;
  report.name = "thm2_linear";
  if (trace.records.empty()) return report;
  double coupling = 1.0 - sigma * tau * K_norm * K_norm;
  double V0 = lyapunov(trace.records.front(), saddle, sigma, tau);
  double decay = 1.0;  // omega^k
  report.ok.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    double lhs = (rec.y - saddle.y_hat).squaredNorm() / (2.0 * tau) +
                 coupling * (rec.x - saddle.x_hat).squaredNorm() / (2.0 * sigma);
    double bound = decay * V0;
    bool ok = lhs <= bound + monitor_tolerance(bound);
    report.ok.push_back(ok ? 1 : 0);
    ++report.checks;
    if (!ok) note_violation(report, rec.k, lhs - bound);
    decay *= omega;
  }
  return report;
}

void annotate_distances(ConvergenceTrace& trace, const SaddleCertificate& saddle, double sigma,
                        double tau) {
  for (auto& rec : trace.records) {
    rec.dist_x = (rec.x - saddle.x_hat).norm();
    rec.dist_y = (rec.y - saddle.y_hat).norm();
    rec.V = rec.dist_x * rec.dist_x / (2.0 * sigma) + rec.dist_y * rec.dist_y / (2.0 * tau);
  }
}

double empirical_log_rate(const std::vector<double>& V, double floor_ratio) {
  if (V.empty()) return std::numeric_limits<double>::quiet_NaN();
  double floor = std::max(V.front() * floor_ratio, 1e-300);
  std::vector<double> logs;
  for (double v : V) {
    if (!(v > floor)) break;
    logs.push_back(std::log(v));
  }
  const std::size_t n = logs.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double k_mean = 0.5 * static_cast<double>(n - 1);
  double log_mean = 0.0;
  for (double lv : logs) log_mean += lv;
  log_mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dk = static_cast<double>(k) - k_mean;
    num += dk * (logs[k] - log_mean);
    den += dk * dk;
  }
  return num / den;
}

std::vector<double> lyapunov_series(const ConvergenceTrace& trace) {
  std::vector<double> V;
  V.reserve(trace.records.size());
  for (const auto& rec : trace.records) V.push_back(rec.V);
  return V;
}

}  // namespace pdpiag
