#pragma once

#include "pdpiag/problem.hpp"
#include "pdpiag/trace.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <vector>

namespace pdpiag {

/// Table of the most recent component gradients. The aggregate is rebuilt as
/// a full ascending-index sum at every refresh, so a replay that sums
/// grad f_i(x_{k - tau_k^i}) in the same order reproduces it bit for bit.
struct GradientMemory {
  std::vector<Vector> entries;       // e_i
  std::vector<std::int64_t> stamps;  // iterate index at which e_i was evaluated
  Vector aggregate;                  // g = sum_i e_i

  int size() const { return static_cast<int>(entries.size()); }
  Vector recompute_aggregate() const;
};

/// Refreshes e_i <- grad f_i(x_new), s_i <- k_new for each index in the set
/// (ascending) and rebuilds the aggregate. Untouched entries are unchanged.
void refresh_memory(GradientMemory& memory, const std::vector<int>& indices, const Vector& x_new,
                    std::int64_t k_new, const SaddleProblem& problem);

enum class ExtrapolationKind { pdhg, theta, arrow_hurwicz };

struct ExtrapolationRule {
  ExtrapolationKind kind = ExtrapolationKind::pdhg;
  double theta = 1.0;  // used by the theta rule only

  static ExtrapolationRule pdhg() { return {ExtrapolationKind::pdhg, 1.0}; }
  static ExtrapolationRule with_theta(double theta) { return {ExtrapolationKind::theta, theta}; }
  static ExtrapolationRule arrow_hurwicz() { return {ExtrapolationKind::arrow_hurwicz, 0.0}; }
};

/// pdhg: 2y - y_prev; theta: y + theta (y - y_prev); arrow_hurwicz: y.
Vector extrapolate(const ExtrapolationRule& rule, const Vector& y, const Vector& y_prev);

enum class ScheduleKind { cyclic, random_bounded, constant };

/// Decides which component gradients are refreshed after each step.
///   cyclic          - exactly component (k mod N), Algorithm-1 style.
///   random_bounded  - each component refreshes with probability p, forced
///                     whenever its staleness would otherwise exceed T.
///   constant        - full refresh every T+1 steps (T = 0 refreshes all,
///                     every step).
/// The object is stateful (RNG + staleness bookkeeping); reset() rewinds it,
/// and the sequence of refresh sets is a pure function of (kind, T, p, seed).
class DelaySchedule {
 public:
  static DelaySchedule cyclic();
  static DelaySchedule random_bounded(int T, double p, std::uint64_t seed);
  static DelaySchedule constant(int T);

  ScheduleKind kind() const { return kind_; }
  int T() const { return T_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  /// Uniform delay bound realized by this schedule for an N-component problem.
  int effective_delay_bound(int num_components) const;

  void reset(int num_components);
  /// Refresh set for step k (0-based component indices, ascending). Must be
  /// called once per step in order.
  std::vector<int> refresh_set(std::int64_t k);

 private:
  ScheduleKind kind_ = ScheduleKind::cyclic;
  int T_ = 0;
  double p_ = 0.5;
  std::uint64_t seed_ = 0;
  int num_components_ = 0;
  std::mt19937_64 rng_;
  std::vector<std::int64_t> stamps_;
};

struct SolverState {
  std::int64_t k = 0;
  Vector x;
  Vector y;
  Vector y_prev;
  GradientMemory memory;
  std::deque<Vector> history_window;  // x_{k-T} .. x_k, clamped at x_0

  std::vector<std::int64_t> delays() const;  // tau_k^i = k - stamp_i
};

class diverged_error : public std::runtime_error {
 public:
  diverged_error(std::string what, SolverState last_finite)
      : std::runtime_error(std::move(what)), last_finite_state(std::move(last_finite)) {}
  SolverState last_finite_state;
};

/// Memory seeded with e_i = grad f_i(x0), stamps 0, y_prev = y0 so every
/// extrapolation rule yields ybar_0 = y0.
SolverState init_state(const SaddleProblem& problem, const Vector& x0, const Vector& y0);

/// One iteration:
///   ybar    = extrapolate(rule, y_k, y_{k-1})
///   x_{k+1} = x_k - sigma g_k - sigma K^T ybar
///   y_{k+1} = prox_{tau h*}(y_k + tau K x_{k+1})
/// followed by the schedule's memory refresh at x_{k+1}. Throws
/// diverged_error (carrying the last finite state) on non-finite iterates.
SolverState pd_piag_step(const SolverState& state, const SaddleProblem& problem, double sigma,
                         double tau, const ExtrapolationRule& rule, DelaySchedule& schedule);

/// Per-iteration observer; return false to stop the run. Receives read-only
/// state and cannot alter the trajectory.
using StepMonitor = std::function<bool(const SolverState&)>;

struct RunOptions {
  std::int64_t max_iters = 1000;
  std::vector<StepMonitor> monitors;
  bool record_timing = false;  // fills wall_ms (makes the trace irreproducible)
};

/// Runs pd_piag_step max_iters times, recording every state (initial state
/// included) with its delay vector and aggregate. Stops early on divergence
/// or when a monitor signals; the termination reason lands in the trace.
ConvergenceTrace run(const SaddleProblem& problem, const Vector& x0, const Vector& y0,
                     double sigma, double tau, const ExtrapolationRule& rule,
                     DelaySchedule schedule, const RunOptions& options);

/// prox of the primal regularizer h recovered from the conjugate's prox via
/// the Moreau identity prox_{sigma h}(v) = v - sigma prox_{h*/sigma}(v/sigma).
Vector prox_primal_via_moreau(const ConjugateTerm& term, double sigma, const Vector& v);

/// Forward-backward splitting step x+ = prox_{sigma h}(x - sigma grad f(x)).
/// Only defined for K = identity problems.
Vector fbs_step(const SaddleProblem& problem, const Vector& x, double sigma);

struct PiagState {
  std::int64_t k = 0;
  Vector x;
  GradientMemory memory;
};

PiagState piag_init(const SaddleProblem& problem, const Vector& x0);

/// x_{k+1} = prox_{sigma h}(x_k - sigma g_k) with the same memory semantics
/// as PD-PIAG. Only defined for K = identity problems.
PiagState piag_step(const PiagState& state, const SaddleProblem& problem, double sigma,
                    DelaySchedule& schedule);

}  // namespace pdpiag
