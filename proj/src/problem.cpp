#include "pdpiag/problem.hpp"

#include <cmath>
#include <random>

namespace pdpiag {

namespace {

Vector seeded_gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace

LinearMap::LinearMap(Matrix K) : K_(std::move(K)) {
  if (K_.rows() < 1 || K_.cols() < 1) {
    throw std::invalid_argument("LinearMap: dimensions must be >= 1");
  }
  is_identity_ = K_.rows() == K_.cols() && K_.isIdentity(0.0);
  // Construction-time estimate: tol 1e-9, capped at 10 * max(d1, d2)
  // iterations; the achieved tolerance stays available in norm_result().
  norm_result_ = operator_norm(*this, 1e-9, 0x5eed0001u, 10 * std::max(d1(), d2()));
  norm_estimate_ = norm_result_.value;
}

LinearMap LinearMap::identity(int d) { return LinearMap(Matrix::Identity(d, d)); }

LinearMap LinearMap::zero(int d2, int d1) { return LinearMap(Matrix::Zero(d2, d1)); }

Vector LinearMap::forward(const Vector& x) const {
  if (x.size() != K_.cols()) throw std::invalid_argument("LinearMap::forward: dimension mismatch");
  return K_ * x;
}

Vector LinearMap::adjoint(const Vector& y) const {
  if (y.size() != K_.rows()) throw std::invalid_argument("LinearMap::adjoint: dimension mismatch");
  return K_.transpose() * y;
}

OperatorNormResult operator_norm(const LinearMap& map, double tol, std::uint64_t seed,
                                 int max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
  const Matrix& K = map.matrix();
  if (max_iters < 0) max_iters = 1000 + 100 * std::max(map.d1(), map.d2());

  std::mt19937_64 rng(seed);
  Vector v = seeded_gaussian(map.d1(), rng);
  double vnorm = v.norm();
  if (vnorm == 0.0) return {0.0, true, 0.0, 0};
  v /= vnorm;

  OperatorNormResult result;
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = K.transpose() * (K * v);  // (K^T K) v
    double wnorm = w.norm();
    if (wnorm == 0.0) {
      // Start vector annihilated; retry once, then accept the zero map.
      v = seeded_gaussian(map.d1(), rng).normalized();
      w = K.transpose() * (K * v);
      wnorm = w.norm();
      if (wnorm == 0.0) return {0.0, true, 0.0, it + 1};
    }
    lambda = v.dot(w);  // Rayleigh quotient of K^T K
    double residual = (w - lambda * v).norm();
    result.iterations = it + 1;
    result.achieved_tol = residual / std::max(lambda, std::numeric_limits<double>::min());
    if (residual <= tol * std::max(lambda, std::numeric_limits<double>::min())) {
      result.converged = true;
      result.value = std::sqrt(std::max(lambda, 0.0));
      return result;
    }
    v = w / wnorm;
  }
  result.converged = false;
  result.value = std::sqrt(std::max(lambda, 0.0));
  return result;
}

SaddleProblem::SaddleProblem(std::vector<SmoothComponent> components, ConjugateTerm conjugate,
                             LinearMap coupling)
    : components_(std::move(components)),
      conjugate_(std::move(conjugate)),
      coupling_(std::move(coupling)) {
  if (components_.empty()) throw std::invalid_argument("SaddleProblem: needs at least one component");
  L_ = 0.0;
  delta_ = 0.0;
  const Vector origin = Vector::Zero(coupling_.d1());
  for (const auto& c : components_) {
    if (!c.value || !c.gradient) throw std::invalid_argument("SaddleProblem: component missing value/gradient");
    if (c.delta > c.L) throw std::invalid_argument("SaddleProblem: component has delta_i > L_i");
    if (c.gradient(origin).size() != coupling_.d1()) {
      throw std::invalid_argument("SaddleProblem: component gradient dimension disagrees with coupling.d1");
    }
    L_ += c.L;
    delta_ += c.delta;
  }
  if (!(L_ > 0.0)) throw std::invalid_argument("SaddleProblem: L = sum L_i must be positive");
  if (!conjugate_.value || !conjugate_.prox) {
    throw std::invalid_argument("SaddleProblem: conjugate term missing value/prox");
  }
}

double eval_lagrangian(const SaddleProblem& problem, const Vector& x, const Vector& y) {
  if (x.size() != problem.d1() || y.size() != problem.d2()) {
    throw std::invalid_argument("eval_lagrangian: dimension mismatch");
  }
  double hstar = problem.conjugate().value(y);
  if (hstar == kInf) return -kInf;
  double fx = 0.0;
  for (const auto& c : problem.components()) fx += c.value(x);
  return fx + problem.coupling().forward(x).dot(y) - hstar;
}

Vector apply_prox(const ConjugateTerm& term, double tau, const Vector& v) {
  if (!(tau > 0.0)) throw std::invalid_argument("apply_prox: tau must be positive");
  Vector u = term.prox(tau, v);
  if (u.size() != v.size()) throw std::invalid_argument("apply_prox: prox changed dimension");
  return u;
}

Vector grad_full(const SaddleProblem& problem, const Vector& x) {
  if (x.size() != problem.d1()) throw std::invalid_argument("grad_full: dimension mismatch");
  Vector g = Vector::Zero(problem.d1());
  for (const auto& c : problem.components()) g += c.gradient(x);
  return g;
}

bool ValidationReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_assumptions(const SaddleProblem& problem, int num_samples,
                                      std::uint64_t seed, double radius, double tol) {
  if (num_samples < 1) throw std::invalid_argument("validate_assumptions: num_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto sample_point = [&](int n) {
    Vector v = seeded_gaussian(n, rng);
    double norm = v.norm();
    if (norm > 0) v /= norm;
    // uniform radius in (0, radius]
    return Vector(v * radius * std::cbrt(unif(rng)));
  };

  ValidationReport report;
  const int N = problem.num_components();
  for (int i = 0; i < N; ++i) {
    const auto& c = problem.components()[static_cast<std::size_t>(i)];
    AssumptionCheck a1{"A1[" + std::to_string(i) + "]"};
    AssumptionCheck b1{"B1[" + std::to_string(i) + "]"};
    for (int s = 0; s < num_samples; ++s) {
      Vector x = sample_point(problem.d1());
      Vector y = sample_point(problem.d1());
      double fy = c.value(y);
      double fx = c.value(x);
      double linear = c.gradient(x).dot(y - x);
      double sq = (y - x).squaredNorm();
      double a1_violation = std::abs(fy - fx - linear) - 0.5 * c.L * sq;
      double b1_violation = (fx + linear + 0.5 * c.delta * sq) - fy;
      a1.worst_violation = std::max(a1.worst_violation, a1_violation);
      b1.worst_violation = std::max(b1.worst_violation, b1_violation);
    }
    a1.pass = a1.worst_violation <= tol;
    b1.pass = b1.worst_violation <= tol;
    report.checks.push_back(a1);
    report.checks.push_back(b1);
  }

  // B2: gamma-strong convexity of h*, using v = (z - w)/t in the
  // subdifferential of h* at w = prox(t, z).
  AssumptionCheck b2{"B2"};
  for (int s = 0; s < num_samples; ++s) {
    Vector z = sample_point(problem.d2());
    double t = 0.1 + unif(rng);
    Vector w = apply_prox(problem.conjugate(), t, z);
    Vector v = (z - w) / t;
    Vector u = sample_point(problem.d2());
    double hu = problem.conjugate().value(u);
    if (hu == kInf) continue;  // inequality trivially holds
    double hw = problem.conjugate().value(w);
    double violation =
        (hw + v.dot(u - w) + 0.5 * problem.gamma() * (u - w).squaredNorm()) - hu;
    b2.worst_violation = std::max(b2.worst_violation, violation);
  }
  b2.pass = b2.worst_violation <= tol;
  report.checks.push_back(b2);
  return report;
}

}  // namespace pdpiag
