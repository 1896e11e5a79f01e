#include "pdpiag/solver.hpp"

#include <chrono>
#include <cmath>

namespace pdpiag {

Vector GradientMemory::recompute_aggregate() const {
  Vector g = Vector::Zero(entries.empty() ? 0 : entries.front().size());
  for (const auto& e : entries) g += e;
  return g;
}

void refresh_memory(GradientMemory& memory, const std::vector<int>& indices, const Vector& x_new,
                    std::int64_t k_new, const SaddleProblem& problem) {
  for (int i : indices) {
    if (i < 0 || i >= memory.size()) {
      throw std::invalid_argument("refresh_memory: component index out of range");
    }
    if (k_new <= memory.stamps[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("refresh_memory: stamp must increase");
    }
  }
  for (int i : indices) {
    memory.entries[static_cast<std::size_t>(i)] =
        problem.components()[static_cast<std::size_t>(i)].gradient(x_new);
    memory.stamps[static_cast<std::size_t>(i)] = k_new;
  }
  if (!indices.empty()) memory.aggregate = memory.recompute_aggregate();
}

Vector extrapolate(const ExtrapolationRule& rule, const Vector& y, const Vector& y_prev) {
  if (y.size() != y_prev.size()) throw std::invalid_argument("extrapolate: dimension mismatch");
  switch (rule.kind) {
    case ExtrapolationKind::pdhg: return 2.0 * y - y_prev;
    case ExtrapolationKind::theta: return y + rule.theta * (y - y_prev);
    case ExtrapolationKind::arrow_hurwicz: return y;
  }
  throw std::logic_error("extrapolate: unknown rule");
}

DelaySchedule DelaySchedule::cyclic() {
  DelaySchedule s;
  s.kind_ = ScheduleKind::cyclic;
  return s;
}

DelaySchedule DelaySchedule::random_bounded(int T, double p, std::uint64_t seed) {
  if (T < 0) throw std::invalid_argument("DelaySchedule: T must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("DelaySchedule: p must be in [0,1]");
  DelaySchedule s;
  s.kind_ = ScheduleKind::random_bounded;
  s.T_ = T;
  s.p_ = p;
  s.seed_ = seed;
  return s;
}

DelaySchedule DelaySchedule::constant(int T) {
  if (T < 0) throw std::invalid_argument("DelaySchedule: T must be >= 0");
  DelaySchedule s;
  s.kind_ = ScheduleKind::constant;
  s.T_ = T;
  return s;
}

int DelaySchedule::effective_delay_bound(int num_components) const {
  switch (kind_) {
    case ScheduleKind::cyclic: return std::max(num_components - 1, 0);
    case ScheduleKind::random_bounded:
    case ScheduleKind::constant: return T_;
  }
  return 0;
}

void DelaySchedule::reset(int num_components) {
  num_components_ = num_components;
  rng_.seed(seed_);
  stamps_.assign(static_cast<std::size_t>(num_components), 0);
}

std::vector<int> DelaySchedule::refresh_set(std::int64_t k) {
  if (num_components_ == 0) throw std::logic_error("DelaySchedule: reset() before use");
  std::vector<int> indices;
  switch (kind_) {
    case ScheduleKind::cyclic:
      indices.push_back(static_cast<int>(k % num_components_));
      break;
    case ScheduleKind::constant:
      if ((k + 1) % (static_cast<std::int64_t>(T_) + 1) == 0) {
        for (int i = 0; i < num_components_; ++i) indices.push_back(i);
      }
      break;
    case ScheduleKind::random_bounded: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int i = 0; i < num_components_; ++i) {
        double u = unif(rng_);
        bool forced = stamps_[static_cast<std::size_t>(i)] <= k - T_;
        if (u < p_ || forced) indices.push_back(i);
      }
      break;
    }
  }
  for (int i : indices) stamps_[static_cast<std::size_t>(i)] = k + 1;
  return indices;
}

std::vector<std::int64_t> SolverState::delays() const {
  std::vector<std::int64_t> d(memory.stamps.size());
  for (std::size_t i = 0; i < memory.stamps.size(); ++i) d[i] = k - memory.stamps[i];
  return d;
}

SolverState init_state(const SaddleProblem& problem, const Vector& x0, const Vector& y0) {
  if (x0.size() != problem.d1() || y0.size() != problem.d2()) {
    throw std::invalid_argument("init_state: dimension mismatch");
  }
  SolverState state;
  state.k = 0;
  state.x = x0;
  state.y = y0;
  state.y_prev = y0;
  state.memory.entries.reserve(static_cast<std::size_t>(problem.num_components()));
  for (const auto& c : problem.components()) state.memory.entries.push_back(c.gradient(x0));
  state.memory.stamps.assign(static_cast<std::size_t>(problem.num_components()), 0);
  state.memory.aggregate = state.memory.recompute_aggregate();
  state.history_window.push_back(x0);
  return state;
}

SolverState pd_piag_step(const SolverState& state, const SaddleProblem& problem, double sigma,
                         double tau, const ExtrapolationRule& rule, DelaySchedule& schedule) {
  if (!(sigma > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("pd_piag_step: sigma and tau must be positive");
  }
  if (state.x.size() != problem.d1() || state.y.size() != problem.d2()) {
    throw std::invalid_argument("pd_piag_step: state/problem dimension mismatch");
  }

  Vector ybar = extrapolate(rule, state.y, state.y_prev);

  SolverState next = state;
  next.k = state.k + 1;
  next.x = state.x - sigma * state.memory.aggregate - sigma * problem.coupling().adjoint(ybar);
  next.y = apply_prox(problem.conjugate(), tau,
                      Vector(state.y + tau * problem.coupling().forward(next.x)));
  next.y_prev = state.y;

  if (!next.x.allFinite() || !next.y.allFinite()) {
    throw diverged_error("pd_piag_step: non-finite iterate at k=" + std::to_string(next.k), state);
  }

  refresh_memory(next.memory, schedule.refresh_set(state.k), next.x, next.k, problem);

  next.history_window.push_back(next.x);
  std::size_t window = static_cast<std::size_t>(schedule.effective_delay_bound(problem.num_components())) + 1;
  while (next.history_window.size() > window) next.history_window.pop_front();
  return next;
}

namespace {

TraceRecord make_record(const SolverState& state) {
  TraceRecord rec;
  rec.k = state.k;
  rec.x = state.x;
  rec.y = state.y;
  rec.aggregate = state.memory.aggregate;
  rec.delays = state.delays();
  return rec;
}

}  // namespace

ConvergenceTrace run(const SaddleProblem& problem, const Vector& x0, const Vector& y0,
                     double sigma, double tau, const ExtrapolationRule& rule,
                     DelaySchedule schedule, const RunOptions& options) {
  if (options.max_iters < 1) throw std::invalid_argument("run: max_iters must be >= 1");
  schedule.reset(problem.num_components());

  ConvergenceTrace trace;
  trace.records.reserve(static_cast<std::size_t>(options.max_iters) + 1);

  SolverState state = init_state(problem, x0, y0);
  trace.records.push_back(make_record(state));

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  for (std::int64_t step = 0; step < options.max_iters; ++step) {
    try {
      state = pd_piag_step(state, problem, sigma, tau, rule, schedule);
    } catch (const diverged_error&) {
      trace.termination = "diverged";
      return trace;
    }
    TraceRecord rec = make_record(state);
    if (options.record_timing) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
    trace.records.push_back(std::move(rec));
    for (const auto& monitor : options.monitors) {
      if (monitor && !monitor(state)) {
        trace.termination = "monitor_stop";
        return trace;
      }
    }
  }
  trace.termination = "completed";
  return trace;
}

Vector prox_primal_via_moreau(const ConjugateTerm& term, double sigma, const Vector& v) {
  if (!(sigma > 0.0)) throw std::invalid_argument("prox_primal_via_moreau: sigma must be positive");
  return v - sigma * apply_prox(term, 1.0 / sigma, Vector(v / sigma));
}

namespace {

void require_identity_coupling(const SaddleProblem& problem, const char* who) {
  if (!problem.coupling().is_identity() || problem.d1() != problem.d2()) {
    throw std::invalid_argument(std::string(who) + ": requires K = identity (d1 = d2)");
  }
}

}  // namespace

Vector fbs_step(const SaddleProblem& problem, const Vector& x, double sigma) {
  require_identity_coupling(problem, "fbs_step");
  if (x.size() != problem.d1()) throw std::invalid_argument("fbs_step: dimension mismatch");
  if (!(sigma > 0.0)) throw std::invalid_argument("fbs_step: sigma must be positive");
  return prox_primal_via_moreau(problem.conjugate(), sigma, Vector(x - sigma * grad_full(problem, x)));
}

PiagState piag_init(const SaddleProblem& problem, const Vector& x0) {
  require_identity_coupling(problem, "piag_init");
  SolverState s = init_state(problem, x0, Vector::Zero(problem.d2()));
  return PiagState{0, s.x, std::move(s.memory)};
}

PiagState piag_step(const PiagState& state, const SaddleProblem& problem, double sigma,
                    DelaySchedule& schedule) {
  require_identity_coupling(problem, "piag_step");
  if (!(sigma > 0.0)) throw std::invalid_argument("piag_step: sigma must be positive");
  PiagState next = state;
  next.k = state.k + 1;
  next.x = prox_primal_via_moreau(problem.conjugate(), sigma,
                                  Vector(state.x - sigma * state.memory.aggregate));
  if (!next.x.allFinite()) {
    throw std::runtime_error("piag_step: non-finite iterate at k=" + std::to_string(next.k));
  }
  refresh_memory(next.memory, schedule.refresh_set(state.k), next.x, next.k, problem);
  return next;
}

}  // namespace pdpiag
