#pragma once

#include "pdpiag/problem.hpp"

namespace pdpiag::catalog {

/// h* == 0 (prox is the identity).
ConjugateTerm zero_conjugate();

/// h* = indicator of {0} (prox maps everything to 0); conjugate of h == 0.
ConjugateTerm point_zero_conjugate(int d2);

/// h*(y) = gamma/2 ||y||^2; prox(tau, v) = v / (1 + tau * gamma).
ConjugateTerm quadratic_conjugate(double gamma);

/// h* = indicator of [-lambda, lambda]^d2, the conjugate of lambda ||.||_1;
/// prox is the componentwise clamp.
ConjugateTerm box_conjugate(double lambda);

/// Diagonal quadratic component f(x) = 1/2 x^T diag(d) x - b^T x with exact
/// constants L = max d_j, delta = min d_j.
SmoothComponent diagonal_quadratic_component(Vector diag, Vector lin);

/// Least-squares block f(x) = 1/2 ||D x - c||^2 with exact spectral constants.
SmoothComponent least_squares_component(Matrix D, Vector c);

struct QuadraticQuadraticParams {
  int d1 = 10;
  int d2 = 10;
  int N = 5;
  std::uint64_t seed = 1;
  double gamma = 1.0;
  double conditioning = 10.0;  // ratio of largest to smallest diagonal entry
};

/// f_i diagonal PSD quadratics, h* = gamma/2 ||y||^2, K dense Gaussian scaled
/// to spectral norm O(1). Admits an analytic saddle point and the exact
/// separable gap oracle.
SaddleProblem quadratic_quadratic(const QuadraticQuadraticParams& params);

struct LassoDualParams {
  int d1 = 10;
  int N = 5;
  int rows_per_block = 4;
  std::uint64_t seed = 1;
  double lambda = 0.5;
};

/// f_i = least squares over a row block of a Gaussian design matrix,
/// h* = indicator of [-lambda, lambda]^d1, K = identity. The saddle problem
/// of lasso with an exact prox but no closed-form saddle point.
SaddleProblem lasso_dual(const LassoDualParams& params);

}  // namespace pdpiag::catalog
