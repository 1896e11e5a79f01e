// Test-only reference computations. Everything here is deliberately written
// as plain brute force or textbook formulas, independent of the library's
// code paths, so the two can disagree when one of them is wrong.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Grid minimization over [lo, hi]^dim with refinement around the incumbent.
// The first pass honors the requested resolution (relative to the range);
// refinement passes shrink the cell until the argmin is pinned to ~1e-8.
inline VectorXd grid_minimize(const std::function<double(const VectorXd&)>& objective,
                              VectorXd lo, VectorXd hi, double resolution = 1e-4) {
  const int dim = static_cast<int>(lo.size());
  VectorXd best = 0.5 * (lo + hi);
  double best_value = objective(best);
  double cell = 0.0;
  for (int pass = 0; pass < 6; ++pass) {
    int points_per_dim;
    if (pass == 0) {
      double range = (hi - lo).maxCoeff();
      points_per_dim = dim == 1 ? static_cast<int>(range / resolution) + 1 : 201;
    } else {
      points_per_dim = 41;
    }
    std::vector<int> index(static_cast<std::size_t>(dim), 0);
    VectorXd point(dim);
    for (;;) {
      for (int d = 0; d < dim; ++d) {
        double t = points_per_dim == 1 ? 0.5 : static_cast<double>(index[static_cast<std::size_t>(d)]) / (points_per_dim - 1);
        point[d] = lo[d] + t * (hi[d] - lo[d]);
      }
      double value = objective(point);
      if (value < best_value) {
        best_value = value;
        best = point;
      }
      int d = 0;
      while (d < dim && ++index[static_cast<std::size_t>(d)] == points_per_dim) {
        index[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
    cell = (hi - lo).maxCoeff() / (points_per_dim - 1);
    if (cell <= 1e-8) break;
    for (int d = 0; d < dim; ++d) {
      lo[d] = best[d] - cell;
      hi[d] = best[d] + cell;
    }
  }
  return best;
}

inline double grid_minimum_value(const std::function<double(const VectorXd&)>& objective,
                                 const VectorXd& lo, const VectorXd& hi,
                                 double resolution = 1e-4) {
  return objective(grid_minimize(objective, lo, hi, resolution));
}

// Central finite differences with step h.
inline VectorXd finite_difference_gradient(const std::function<double(const VectorXd&)>& f,
                                           const VectorXd& x, double h = 1e-5) {
  VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    VectorXd xp = x;
    VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Largest singular value through a dense symmetric eigensolve of K^T K.
inline double dense_operator_norm(const MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K.transpose() * K);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

// Two-pass arithmetic mean of iterates 1..M.
inline VectorXd two_pass_mean(const std::vector<VectorXd>& iterates, int M) {
  VectorXd sum = VectorXd::Zero(iterates.front().size());
  for (int k = 1; k <= M; ++k) sum += iterates[static_cast<std::size_t>(k)];
  return sum / static_cast<double>(M);
}

// Constructive generator for the scalar recursion
//   V_{k+1} = a (V_k - b w_k + c sum_{j=k-k0}^{k} w_j),
// which satisfies the hypothesis with equality by construction.
struct Lemma1Sequence {
  std::vector<double> V;
  std::vector<double> omega;
};

inline Lemma1Sequence generate_lemma1_sequence(double a, double b, double c, int k0, int length,
                                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Lemma1Sequence seq;
  seq.V.resize(static_cast<std::size_t>(length));
  seq.omega.resize(static_cast<std::size_t>(length));
  seq.V[0] = 1.0 + unif(rng);
  for (int k = 0; k < length; ++k) seq.omega[static_cast<std::size_t>(k)] = unif(rng);
  for (int k = 0; k + 1 < length; ++k) {
    double window = 0.0;
    for (int j = k - k0; j <= k; ++j) {
      if (j >= 0) window += seq.omega[static_cast<std::size_t>(j)];
    }
    seq.V[static_cast<std::size_t>(k + 1)] =
        a * (seq.V[static_cast<std::size_t>(k)] - b * seq.omega[static_cast<std::size_t>(k)] + c * window);
  }
  return seq;
}

// One full-gradient Arrow-Hurwicz step written from the update equations,
// used as the zero-delay reference.
struct AhStep {
  VectorXd x;
  VectorXd y;
};

inline AhStep reference_arrow_hurwicz_step(
    const std::function<VectorXd(const VectorXd&)>& grad_f, const MatrixXd& K,
    const std::function<VectorXd(double, const VectorXd&)>& prox_hstar, const VectorXd& x,
    const VectorXd& y, double sigma, double tau) {
  AhStep next;
  next.x = x - sigma * (grad_f(x) + K.transpose() * y);
  next.y = prox_hstar(tau, y + tau * (K * next.x));
  return next;
}

}  // namespace oracles
