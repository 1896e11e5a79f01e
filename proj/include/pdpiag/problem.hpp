#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpiag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One smooth additive component f_i of the primal objective, together with
/// its declared smoothness constant L_i and strong-convexity modulus delta_i
/// (delta_i may be negative; only the sum over components must be positive
/// for the linear-rate regime).
struct SmoothComponent {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double L = 0.0;
  double delta = 0.0;
};

/// The conjugate regularizer h* with its proximal map.
/// prox(tau, v) must return argmin_u { h*(u) + ||u - v||^2 / (2 tau) }.
/// value may return +inf (indicator conjugates are first-class citizens).
struct ConjugateTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(double, const Vector&)> prox;
  double gamma = 0.0;  // strong-convexity modulus, 0 when merely convex
};

struct OperatorNormResult {
  double value = 0.0;
  bool converged = false;
  double achieved_tol = 0.0;
  int iterations = 0;
};

/// Dense linear coupling K : R^d1 -> R^d2 with cached spectral norm.
class LinearMap {
 public:
  explicit LinearMap(Matrix K);
  static LinearMap identity(int d);
  static LinearMap zero(int d2, int d1);

  Vector forward(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

  int d1() const { return static_cast<int>(K_.cols()); }
  int d2() const { return static_cast<int>(K_.rows()); }
  const Matrix& matrix() const { return K_; }
  bool is_identity() const { return is_identity_; }

  /// Cached ||K|| from construction (power iteration, tol 1e-9).
  double norm_estimate() const { return norm_estimate_; }
  const OperatorNormResult& norm_result() const { return norm_result_; }

 private:
  Matrix K_;
  bool is_identity_ = false;
  double norm_estimate_ = 0.0;
  OperatorNormResult norm_result_;
};

/// Spectral norm estimate via power iteration on K^T K.
/// Deterministic for a fixed seed. If the iteration cap is hit the best
/// estimate is returned with converged = false and the residual-based
/// achieved tolerance.
OperatorNormResult operator_norm(const LinearMap& map, double tol,
                                 std::uint64_t seed = 0x5eed0001u,
                                 int max_iters = -1);

/// Separable-quadratic certificate for f: f(x) = 1/2 x^T diag(d) x - lin^T x.
/// Present only when every component is a diagonal quadratic, which is what
/// the exact gap oracle requires.
struct SeparableQuadraticF {
  Vector diag;
  Vector lin;
};

enum class DualKind {
  quadratic,   // h*(y) = gamma/2 ||y||^2
  box,         // h* = indicator of [-lambda, lambda]^d2
  zero,        // h* == 0
  point_zero,  // h* = indicator of {0}
};

/// Structural tag for the conjugate term, used by gap oracles and baselines.
struct DualStructure {
  DualKind kind = DualKind::zero;
  double gamma = 0.0;
  double lambda = 0.0;
};

class SaddleProblem {
 public:
  SaddleProblem(std::vector<SmoothComponent> components, ConjugateTerm conjugate,
                LinearMap coupling);

  int num_components() const { return static_cast<int>(components_.size()); }
  int d1() const { return coupling_.d1(); }
  int d2() const { return coupling_.d2(); }
  const std::vector<SmoothComponent>& components() const { return components_; }
  const ConjugateTerm& conjugate() const { return conjugate_; }
  const LinearMap& coupling() const { return coupling_; }

  double L() const { return L_; }
  double delta() const { return delta_; }
  double gamma() const { return conjugate_.gamma; }
  double K_norm() const { return coupling_.norm_estimate(); }

  // Optional structure certificates filled by the catalog.
  std::optional<SeparableQuadraticF> f_structure;
  std::optional<DualStructure> dual_structure;

 private:
  std::vector<SmoothComponent> components_;
  ConjugateTerm conjugate_;
  LinearMap coupling_;
  double L_ = 0.0;
  double delta_ = 0.0;
};

/// L(x, y) = sum_i f_i(x) + <Kx, y> - h*(y).
/// Returns -inf when h*(y) = +inf so gap maximization can skip infeasible
/// points instead of throwing.
double eval_lagrangian(const SaddleProblem& problem, const Vector& x, const Vector& y);

/// prox of h* with parameter tau > 0.
Vector apply_prox(const ConjugateTerm& term, double tau, const Vector& v);

/// Full (zero-delay) gradient sum_i grad f_i(x), accumulated in ascending
/// component order so repeated evaluations are bit-identical.
Vector grad_full(const SaddleProblem& problem, const Vector& x);

struct AssumptionCheck {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;  // positive means the inequality failed by that much
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/// Samples point pairs from a ball of the given radius and checks the
/// declared constants: A1 per component, B1 per component, B2 for h*
/// (subgradients obtained through the prox map). Violations are reported,
/// never thrown.
ValidationReport validate_assumptions(const SaddleProblem& problem, int num_samples,
                                      std::uint64_t seed, double radius = 2.0,
                                      double tol = 1e-9);

}  // namespace pdpiag
