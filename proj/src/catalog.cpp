#include "pdpiag/catalog.hpp"

#include <cmath>
#include <random>

namespace pdpiag::catalog {

namespace {

Vector gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  }
  return m;
}

}  // namespace

ConjugateTerm zero_conjugate() {
  ConjugateTerm term;
  term.value = [](const Vector&) { return 0.0; };
  term.prox = [](double, const Vector& v) { return v; };
  term.gamma = 0.0;
  return term;
}

ConjugateTerm point_zero_conjugate(int d2) {
  ConjugateTerm term;
  term.value = [](const Vector& y) { return y.isZero(0.0) ? 0.0 : kInf; };
  term.prox = [d2](double, const Vector&) { return Vector(Vector::Zero(d2)); };
  term.gamma = 0.0;
  return term;
}

ConjugateTerm quadratic_conjugate(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("quadratic_conjugate: gamma must be >= 0");
  ConjugateTerm term;
  term.value = [gamma](const Vector& y) { return 0.5 * gamma * y.squaredNorm(); };
  term.prox = [gamma](double tau, const Vector& v) { return Vector(v / (1.0 + tau * gamma)); };
  term.gamma = gamma;
  return term;
}

ConjugateTerm box_conjugate(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("box_conjugate: lambda must be positive");
  ConjugateTerm term;
  term.value = [lambda](const Vector& y) {
    return (y.array().abs() <= lambda).all() ? 0.0 : kInf;
  };
  term.prox = [lambda](double, const Vector& v) {
    return Vector(v.array().min(lambda).max(-lambda));
  };
  term.gamma = 0.0;
  return term;
}

SmoothComponent diagonal_quadratic_component(Vector diag, Vector lin) {
  if (diag.size() != lin.size()) {
    throw std::invalid_argument("diagonal_quadratic_component: dimension mismatch");
  }
  SmoothComponent c;
  c.L = diag.maxCoeff();
  c.delta = diag.minCoeff();
  c.value = [diag, lin](const Vector& x) {
    return 0.5 * x.dot(diag.cwiseProduct(x)) - lin.dot(x);
  };
  c.gradient = [diag, lin](const Vector& x) { return Vector(diag.cwiseProduct(x) - lin); };
  return c;
}

SmoothComponent least_squares_component(Matrix D, Vector c_vec) {
  if (D.rows() != c_vec.size()) {
    throw std::invalid_argument("least_squares_component: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(D.transpose() * D);
  SmoothComponent c;
  c.L = es.eigenvalues().maxCoeff();
  c.delta = std::max(es.eigenvalues().minCoeff(), 0.0);
  c.value = [D, c_vec](const Vector& x) { return 0.5 * (D * x - c_vec).squaredNorm(); };
  c.gradient = [D, c_vec](const Vector& x) { return Vector(D.transpose() * (D * x - c_vec)); };
  return c;
}

SaddleProblem quadratic_quadratic(const QuadraticQuadraticParams& params) {
  if (params.d1 < 1 || params.d2 < 1 || params.N < 1) {
    throw std::invalid_argument("quadratic_quadratic: dimensions and N must be >= 1");
  }
  if (!(params.conditioning >= 1.0)) {
    throw std::invalid_argument("quadratic_quadratic: conditioning must be >= 1");
  }
  if (!(params.gamma > 0.0)) {
    throw std::invalid_argument("quadratic_quadratic: gamma must be positive");
  }
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double hi = 1.0;
  const double lo = 1.0 / params.conditioning;

  std::vector<SmoothComponent> components;
  Vector total_diag = Vector::Zero(params.d1);
  Vector total_lin = Vector::Zero(params.d1);
  for (int i = 0; i < params.N; ++i) {
    Vector diag(params.d1);
    for (int j = 0; j < params.d1; ++j) diag[j] = lo + (hi - lo) * unif(rng);
    Vector lin = gaussian_vector(params.d1, rng);
    total_diag += diag;
    total_lin += lin;
    components.push_back(diagonal_quadratic_component(std::move(diag), std::move(lin)));
  }

  Matrix K = gaussian_matrix(params.d2, params.d1, rng) /
             (std::sqrt(static_cast<double>(params.d1)) + std::sqrt(static_cast<double>(params.d2)));

  SaddleProblem problem(std::move(components), quadratic_conjugate(params.gamma),
                        LinearMap(std::move(K)));
  problem.f_structure = SeparableQuadraticF{total_diag, total_lin};
  problem.dual_structure = DualStructure{DualKind::quadratic, params.gamma, 0.0};
  return problem;
}

SaddleProblem lasso_dual(const LassoDualParams& params) {
  if (params.d1 < 1 || params.N < 1 || params.rows_per_block < 1) {
    throw std::invalid_argument("lasso_dual: dimensions and N must be >= 1");
  }
  std::mt19937_64 rng(params.seed);

  std::vector<SmoothComponent> components;
  for (int i = 0; i < params.N; ++i) {
    Matrix D = gaussian_matrix(params.rows_per_block, params.d1, rng) /
               std::sqrt(static_cast<double>(params.rows_per_block));
    Vector c = gaussian_vector(params.rows_per_block, rng);
    components.push_back(least_squares_component(std::move(D), std::move(c)));
  }

  SaddleProblem problem(std::move(components), box_conjugate(params.lambda),
                        LinearMap::identity(params.d1));
  problem.dual_structure = DualStructure{DualKind::box, 0.0, params.lambda};
  return problem;
}

}  // namespace pdpiag::catalog
