#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pdpiag/analysis.hpp"
#include "pdpiag/catalog.hpp"
#include "pdpiag/solver.hpp"

using namespace pdpiag;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

SmoothComponent half_square() {
  SmoothComponent c;
  c.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  c.gradient = [](const Vector& x) { return x; };
  c.L = 1.0;
  c.delta = 1.0;
  return c;
}

SmoothComponent linear_component(Vector coeff) {
  SmoothComponent c;
  c.value = [coeff](const Vector& x) { return coeff.dot(x); };
  c.gradient = [coeff](const Vector&) { return coeff; };
  c.L = 0.0;
  c.delta = 0.0;
  return c;
}

// f = x^2/2, h* = y^2/2, K = [1]
SaddleProblem scalar_problem() {
  return SaddleProblem({half_square()}, catalog::quadratic_conjugate(1.0), LinearMap::identity(1));
}

// Exact bit-level replay of g_k = sum_i grad f_i(x_{k - tau_k^i}) from the
// recorded iterates, plus the delay bound.
void check_memory_replay(const ConvergenceTrace& trace, const SaddleProblem& problem, int T) {
  for (const auto& rec : trace.records) {
    REQUIRE(rec.delays.size() == static_cast<std::size_t>(problem.num_components()));
    Vector g = Vector::Zero(problem.d1());
    for (int i = 0; i < problem.num_components(); ++i) {
      std::int64_t delay = rec.delays[static_cast<std::size_t>(i)];
      CHECK(delay >= 0);
      CHECK(delay <= T);
      const Vector& past = trace.at(rec.k - delay).x;
      g += problem.components()[static_cast<std::size_t>(i)].gradient(past);
    }
    CHECK((g - rec.aggregate).cwiseAbs().maxCoeff() == 0.0);
  }
}

}  // namespace

TEST_CASE("init_state seeds the memory at x0") {
  SUBCASE("gradient at the minimizer is zero") {
    Vector diag = vec({1.0, 2.0});
    SaddleProblem problem({catalog::diagonal_quadratic_component(diag, Vector::Zero(2))},
                          catalog::quadratic_conjugate(1.0), LinearMap::identity(2));
    SolverState s = init_state(problem, Vector::Zero(2), Vector::Zero(2));
    CHECK(s.memory.aggregate.norm() == 0.0);
    CHECK(s.memory.stamps == std::vector<std::int64_t>{0});
  }
  SUBCASE("two components at x0 = 1") {
    SaddleProblem problem({half_square(), linear_component(vec({1.0}))},
                          catalog::zero_conjugate(), LinearMap::identity(1));
    SolverState s = init_state(problem, vec({1.0}), vec({0.0}));
    CHECK(s.memory.entries[0][0] == 1.0);
    CHECK(s.memory.entries[1][0] == 1.0);
    CHECK(s.memory.aggregate[0] == 2.0);
    CHECK(s.y_prev == s.y);
    CHECK(s.k == 0);
  }
  SUBCASE("aggregate equals grad_full at start") {
    catalog::QuadraticQuadraticParams params;
    params.d1 = 6;
    params.d2 = 4;
    params.N = 4;
    params.seed = 3;
    SaddleProblem problem = catalog::quadratic_quadratic(params);
    Vector x0 = Vector::Constant(6, 0.7);
    SolverState s = init_state(problem, x0, Vector::Zero(4));
    CHECK((s.memory.aggregate - grad_full(problem, x0)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("dimension mismatch") {
    SaddleProblem problem = scalar_problem();
    CHECK_THROWS_AS(init_state(problem, Vector::Zero(2), Vector::Zero(1)), std::invalid_argument);
  }
}

TEST_CASE("extrapolate implements the three rules") {
  CHECK(extrapolate(ExtrapolationRule::pdhg(), vec({2.0}), vec({1.0}))[0] == 3.0);
  CHECK(extrapolate(ExtrapolationRule::with_theta(0.5), vec({2.0}), vec({1.0}))[0] == 2.5);
  Vector y = vec({7.0, -1.0});
  CHECK(extrapolate(ExtrapolationRule::arrow_hurwicz(), y, vec({3.0, 3.0})) == y);
}

TEST_CASE("pd_piag_step reduces to gradient descent when K = 0 and h* = 0") {
  SaddleProblem problem({half_square()}, catalog::zero_conjugate(), LinearMap::zero(1, 1));
  DelaySchedule schedule = DelaySchedule::constant(0);
  schedule.reset(1);
  SolverState s = init_state(problem, vec({1.0}), vec({0.0}));
  SolverState next = pd_piag_step(s, problem, 0.5, 0.3, ExtrapolationRule::pdhg(), schedule);
  CHECK(next.x[0] == 0.5);
  CHECK(next.y[0] == 0.0);
  CHECK(next.k == 1);
}

TEST_CASE("pd_piag_step matches the one-step hand computation") {
  // sigma = tau = 0.1, Arrow-Hurwicz: ybar = 0, x1 = 0.9,
  // y1 = (0 + 0.1 * 0.9) / 1.1
  SaddleProblem problem = scalar_problem();
  DelaySchedule schedule = DelaySchedule::cyclic();
  schedule.reset(1);
  SolverState s = init_state(problem, vec({1.0}), vec({0.0}));
  SolverState next = pd_piag_step(s, problem, 0.1, 0.1, ExtrapolationRule::arrow_hurwicz(), schedule);
  CHECK(next.x[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(next.y[0] == doctest::Approx(0.09 / 1.1).epsilon(1e-15));
  CHECK(next.y_prev[0] == 0.0);
}

TEST_CASE("cyclic schedule refreshes exactly component k mod N") {
  SaddleProblem problem({half_square(), linear_component(vec({1.0}))},
                        catalog::quadratic_conjugate(1.0), LinearMap::identity(1));
  DelaySchedule schedule = DelaySchedule::cyclic();
  schedule.reset(2);
  SolverState s0 = init_state(problem, vec({1.0}), vec({0.0}));
  SolverState s1 = pd_piag_step(s0, problem, 0.1, 0.1, ExtrapolationRule::pdhg(), schedule);
  // After step 0 only e_0 was refreshed, at x_1.
  CHECK(s1.memory.stamps == std::vector<std::int64_t>{1, 0});
  CHECK(s1.memory.entries[0][0] == s1.x[0]);  // grad f_1 = x
  CHECK(s1.memory.entries[1][0] == 1.0);      // still grad f_2(x_0)
  CHECK(s1.memory.aggregate[0] == s1.x[0] + 1.0);
  CHECK(s1.delays() == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("refresh_memory") {
  SaddleProblem problem({half_square(), linear_component(vec({2.0})), half_square()},
                        catalog::zero_conjugate(), LinearMap::identity(1));
  SolverState s = init_state(problem, vec({1.0}), vec({0.0}));

  SUBCASE("empty index set leaves memory untouched") {
    GradientMemory before = s.memory;
    refresh_memory(s.memory, {}, vec({5.0}), 1, problem);
    CHECK(s.memory.aggregate == before.aggregate);
    CHECK(s.memory.stamps == before.stamps);
  }
  SUBCASE("full refresh equals grad_full") {
    Vector x_new = vec({-0.3});
    refresh_memory(s.memory, {0, 1, 2}, x_new, 1, problem);
    CHECK((s.memory.aggregate - grad_full(problem, x_new)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single-index refresh keeps aggregate equal to the entry sum") {
    refresh_memory(s.memory, {1}, vec({4.0}), 1, problem);
    CHECK((s.memory.aggregate - s.memory.recompute_aggregate()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.memory.stamps == std::vector<std::int64_t>{0, 1, 0});
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(refresh_memory(s.memory, {3}, vec({0.0}), 1, problem), std::invalid_argument);
  }
  SUBCASE("stamps must increase") {
    CHECK_THROWS_AS(refresh_memory(s.memory, {0}, vec({0.0}), 0, problem), std::invalid_argument);
  }
}

TEST_CASE("run with max_iters = 1 reproduces one pd_piag_step") {
  SaddleProblem problem = scalar_problem();
  RunOptions options;
  options.max_iters = 1;
  ConvergenceTrace trace = run(problem, vec({1.0}), vec({0.5}), 0.2, 0.3,
                               ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), options);
  DelaySchedule schedule = DelaySchedule::cyclic();
  schedule.reset(1);
  SolverState expected = pd_piag_step(init_state(problem, vec({1.0}), vec({0.5})), problem, 0.2,
                                      0.3, ExtrapolationRule::pdhg(), schedule);
  REQUIRE(trace.records.size() == 2);
  CHECK(trace.records[1].x == expected.x);
  CHECK(trace.records[1].y == expected.y);
  CHECK(trace.termination == "completed");
}

TEST_CASE("certified scalar run reaches the analytic saddle") {
  // f = x^2/2 - x, h* = y^2/2, K = [1]; saddle at (0.5, 0.5).
  // sigma = tau = 0.4 satisfies the first theorem's condition (slack 0.2).
  SaddleProblem problem({catalog::diagonal_quadratic_component(vec({1.0}), vec({1.0}))},
                        catalog::quadratic_conjugate(1.0), LinearMap::identity(1));
  SaddleCertificate saddle = saddle_quadratic(Matrix::Identity(1, 1), vec({1.0}),
                                              Matrix::Identity(1, 1), 1.0);
  CHECK(saddle.x_hat[0] == doctest::Approx(0.5));
  RunOptions options;
  options.max_iters = 10000;
  ConvergenceTrace trace = run(problem, vec({0.0}), vec({0.0}), 0.4, 0.4,
                               ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), options);
  CHECK((trace.records.back().x - saddle.x_hat).norm() <= 1e-6);
  CHECK((trace.records.back().y - saddle.y_hat).norm() <= 1e-6);
}

TEST_CASE("same seed produces bit-identical traces") {
  catalog::QuadraticQuadraticParams params;
  params.d1 = 5;
  params.d2 = 4;
  params.N = 3;
  params.seed = 9;
  SaddleProblem problem = catalog::quadratic_quadratic(params);
  RunOptions options;
  options.max_iters = 200;
  auto go = [&] {
    return run(problem, Vector::Zero(5), Vector::Zero(4), 0.01, 0.01, ExtrapolationRule::pdhg(),
               DelaySchedule::random_bounded(3, 0.4, 77), options);
  };
  ConvergenceTrace a = go();
  ConvergenceTrace b = go();
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].y == b.records[i].y);
    CHECK(a.records[i].aggregate == b.records[i].aggregate);
    CHECK(a.records[i].delays == b.records[i].delays);
  }
}

TEST_CASE("monitors observe but cannot alter the trajectory") {
  SaddleProblem problem = scalar_problem();
  RunOptions plain;
  plain.max_iters = 50;
  ConvergenceTrace without = run(problem, vec({1.0}), vec({0.0}), 0.3, 0.3,
                                 ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), plain);
  RunOptions monitored = plain;
  double sum = 0.0;
  monitored.monitors.push_back([&sum](const SolverState& s) {
    sum += s.x.norm();
    return true;
  });
  ConvergenceTrace with = run(problem, vec({1.0}), vec({0.0}), 0.3, 0.3,
                              ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), monitored);
  REQUIRE(with.records.size() == without.records.size());
  for (std::size_t i = 0; i < with.records.size(); ++i) {
    CHECK(with.records[i].x == without.records[i].x);
    CHECK(with.records[i].y == without.records[i].y);
  }
  CHECK(sum > 0.0);
}

TEST_CASE("monitor can stop the run early") {
  SaddleProblem problem = scalar_problem();
  RunOptions options;
  options.max_iters = 100;
  options.monitors.push_back([](const SolverState& s) { return s.k < 5; });
  ConvergenceTrace trace = run(problem, vec({1.0}), vec({0.0}), 0.3, 0.3,
                               ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), options);
  CHECK(trace.termination == "monitor_stop");
  CHECK(trace.iterations() == 5);
}

TEST_CASE("divergence is detected and carries the last finite state") {
  SaddleProblem problem = scalar_problem();
  DelaySchedule schedule = DelaySchedule::cyclic();
  schedule.reset(1);
  SolverState s = init_state(problem, vec({1e308}), vec({0.0}));
  CHECK_THROWS_AS(
      pd_piag_step(s, problem, 100.0, 0.1, ExtrapolationRule::pdhg(), schedule),
      diverged_error);
  try {
    schedule.reset(1);
    pd_piag_step(s, problem, 100.0, 0.1, ExtrapolationRule::pdhg(), schedule);
  } catch (const diverged_error& e) {
    CHECK(e.last_finite_state.x[0] == 1e308);
  }

  RunOptions options;
  options.max_iters = 2000;
  ConvergenceTrace trace = run(problem, vec({1.0}), vec({0.0}), 100.0, 0.1,
                               ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), options);
  CHECK(trace.termination == "diverged");
  CHECK(trace.records.size() < 2001);
  for (const auto& rec : trace.records) CHECK(rec.x.allFinite());
}

TEST_CASE("memory replay is exact under a random bounded schedule") {
  catalog::QuadraticQuadraticParams params;
  params.d1 = 6;
  params.d2 = 5;
  params.N = 4;
  params.seed = 21;
  SaddleProblem problem = catalog::quadratic_quadratic(params);
  RunOptions options;
  options.max_iters = 300;
  const int T = 4;
  ConvergenceTrace trace =
      run(problem, Vector::Zero(6), Vector::Zero(5), 0.005, 0.005, ExtrapolationRule::pdhg(),
          DelaySchedule::random_bounded(T, 0.3, 123), options);
  CHECK(trace.termination == "completed");
  check_memory_replay(trace, problem, T);
}

TEST_CASE("cyclic delays reach exactly N-1 after warm-up and never exceed it") {
  SaddleProblem problem({half_square(), linear_component(vec({1.0})), half_square()},
                        catalog::quadratic_conjugate(1.0), LinearMap::identity(1));
  RunOptions options;
  options.max_iters = 30;
  ConvergenceTrace trace = run(problem, vec({0.5}), vec({0.0}), 0.05, 0.05,
                               ExtrapolationRule::pdhg(), DelaySchedule::cyclic(), options);
  std::int64_t max_delay = 0;
  for (const auto& rec : trace.records) {
    for (auto d : rec.delays) max_delay = std::max(max_delay, d);
  }
  CHECK(max_delay == 2);  // N - 1
  check_memory_replay(trace, problem, 2);
}

TEST_CASE("zero-delay PD-PIAG matches the reference Arrow-Hurwicz iteration") {
  catalog::QuadraticQuadraticParams params;
  params.d1 = 4;
  params.d2 = 3;
  params.N = 3;
  params.seed = 33;
  SaddleProblem problem = catalog::quadratic_quadratic(params);
  const double sigma = 0.02;
  const double tau = 0.02;
  RunOptions options;
  options.max_iters = 100;
  ConvergenceTrace trace =
      run(problem, Vector::Zero(4), Vector::Zero(3), sigma, tau,
          ExtrapolationRule::arrow_hurwicz(), DelaySchedule::constant(0), options);

  auto grad = [&problem](const Vector& x) { return grad_full(problem, x); };
  Vector x = Vector::Zero(4);
  Vector y = Vector::Zero(3);
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    oracles::AhStep step = oracles::reference_arrow_hurwicz_step(
        grad, problem.coupling().matrix(), problem.conjugate().prox, x, y, sigma, tau);
    x = step.x;
    y = step.y;
    CHECK((trace.records[k].x - x).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((trace.records[k].y - y).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("fbs_step") {
  SUBCASE("pure gradient step when h = 0") {
    // h == 0 corresponds to h* = indicator of {0}.
    SaddleProblem problem({half_square()}, catalog::point_zero_conjugate(1),
                          LinearMap::identity(1));
    CHECK(fbs_step(problem, vec({1.0}), 0.5)[0] == 0.5);
  }
  SUBCASE("soft-thresholding through the Moreau identity") {
    // h = |.|: h* = indicator of [-1, 1]; f = (x-3)^2/2 at x = 3 has zero
    // gradient, so the step is prox_{1*|.|}(3) = 2.
    SmoothComponent shifted;
    shifted.value = [](const Vector& x) { return 0.5 * (x[0] - 3.0) * (x[0] - 3.0); };
    shifted.gradient = [](const Vector& x) { return Vector(x.array() - 3.0); };
    shifted.L = 1.0;
    shifted.delta = 1.0;
    SaddleProblem problem({shifted}, catalog::box_conjugate(1.0), LinearMap::identity(1));
    double out = fbs_step(problem, vec({3.0}), 1.0)[0];
    CHECK(out == doctest::Approx(2.0).epsilon(1e-12));
    // cross-check against the brute-force prox of sigma * |.|
    auto objective = [](const Vector& u) {
      return std::abs(u[0]) + (u[0] - 3.0) * (u[0] - 3.0) / 2.0;
    };
    Vector brute = oracles::grid_minimize(objective, vec({-5.0}), vec({5.0}));
    CHECK(std::abs(out - brute[0]) <= 1e-6);
  }
  SUBCASE("Moreau identity on random points") {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> gauss(0.0, 2.0);
    ConjugateTerm box = catalog::box_conjugate(0.8);
    ConjugateTerm quad = catalog::quadratic_conjugate(1.7);
    for (const ConjugateTerm* term : {&box, &quad}) {
      for (int trial = 0; trial < 100; ++trial) {
        double sigma = 0.2 + std::abs(gauss(rng));
        Vector v(3);
        for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
        Vector lhs = prox_primal_via_moreau(*term, sigma, v) +
                     sigma * apply_prox(*term, 1.0 / sigma, Vector(v / sigma));
        CHECK((lhs - v).norm() <= 1e-10);
      }
    }
  }
  SUBCASE("refuses non-identity couplings") {
    SaddleProblem problem({half_square()}, catalog::zero_conjugate(), LinearMap::zero(1, 1));
    CHECK_THROWS_AS(fbs_step(problem, vec({1.0}), 0.5), std::invalid_argument);
  }
}

TEST_CASE("piag_step") {
  SUBCASE("T = 0 and h = 0 reproduce full-gradient descent") {
    SaddleProblem problem({half_square()}, catalog::point_zero_conjugate(1),
                          LinearMap::identity(1));
    DelaySchedule schedule = DelaySchedule::constant(0);
    schedule.reset(1);
    PiagState s = piag_init(problem, vec({1.0}));
    double x = 1.0;
    for (int k = 0; k < 10; ++k) {
      s = piag_step(s, problem, 0.3, schedule);
      x = x - 0.3 * x;
      CHECK(s.x[0] == doctest::Approx(x).epsilon(1e-15));
    }
  }
  SUBCASE("hand replay of three cyclic steps on two components") {
    SaddleProblem problem({half_square(), linear_component(vec({1.0}))},
                          catalog::point_zero_conjugate(1), LinearMap::identity(1));
    DelaySchedule schedule = DelaySchedule::cyclic();
    schedule.reset(2);
    PiagState s = piag_init(problem, vec({1.0}));
    const double sigma = 0.1;
    // by hand: g0 = 2, x1 = 0.8; refresh e0 at x1 -> g1 = 1.8, x2 = 0.62;
    // refresh e1 (still 1) -> g2 = 1.8, x3 = 0.44
    s = piag_step(s, problem, sigma, schedule);
    CHECK(s.x[0] == doctest::Approx(0.8).epsilon(1e-15));
    s = piag_step(s, problem, sigma, schedule);
    CHECK(s.x[0] == doctest::Approx(0.62).epsilon(1e-15));
    s = piag_step(s, problem, sigma, schedule);
    CHECK(s.x[0] == doctest::Approx(0.44).epsilon(1e-15));
  }
  SUBCASE("PD-PIAG with h* = indicator{0} matches PIAG with h = 0 exactly") {
    std::vector<SmoothComponent> components = {half_square(), linear_component(vec({0.5}))};
    SaddleProblem problem(components, catalog::point_zero_conjugate(1), LinearMap::identity(1));
    DelaySchedule pd_schedule = DelaySchedule::cyclic();
    DelaySchedule piag_schedule = DelaySchedule::cyclic();
    pd_schedule.reset(2);
    piag_schedule.reset(2);
    SolverState pd = init_state(problem, vec({1.0}), vec({0.0}));
    PiagState pg = piag_init(problem, vec({1.0}));
    for (int k = 0; k < 100; ++k) {
      pd = pd_piag_step(pd, problem, 0.1, 0.2, ExtrapolationRule::pdhg(), pd_schedule);
      pg = piag_step(pg, problem, 0.1, piag_schedule);
      CHECK(pd.x == pg.x);
      CHECK(pd.y.norm() == 0.0);
      CHECK(pd.memory.aggregate == pg.memory.aggregate);
    }
  }
}

TEST_CASE("history window holds the last T+1 iterates") {
  SaddleProblem problem({half_square(), linear_component(vec({0.2})), half_square()},
                        catalog::quadratic_conjugate(1.0), LinearMap::identity(1));
  DelaySchedule schedule = DelaySchedule::cyclic();  // effective T = 2
  schedule.reset(3);
  SolverState s = init_state(problem, vec({1.0}), vec({0.0}));
  std::vector<Vector> xs = {s.x};
  for (int k = 0; k < 10; ++k) {
    s = pd_piag_step(s, problem, 0.05, 0.05, ExtrapolationRule::pdhg(), schedule);
    xs.push_back(s.x);
    std::size_t expected = std::min<std::size_t>(xs.size(), 3);
    REQUIRE(s.history_window.size() == expected);
    for (std::size_t j = 0; j < expected; ++j) {
      CHECK(s.history_window[j] == xs[xs.size() - expected + j]);
    }
  }
}

TEST_CASE("random_bounded schedule honors its delay cap") {
  catalog::QuadraticQuadraticParams params;
  params.d1 = 3;
  params.d2 = 3;
  params.N = 5;
  params.seed = 57;
  SaddleProblem problem = catalog::quadratic_quadratic(params);
  for (int T : {0, 1, 3}) {
    RunOptions options;
    options.max_iters = 200;
    ConvergenceTrace trace =
        run(problem, Vector::Zero(3), Vector::Zero(3), 0.004, 0.004, ExtrapolationRule::pdhg(),
            DelaySchedule::random_bounded(T, 0.2, 91), options);
    std::int64_t max_delay = 0;
    for (const auto& rec : trace.records) {
      for (auto d : rec.delays) max_delay = std::max(max_delay, d);
    }
    CHECK(max_delay <= T);
    if (T > 0) CHECK(max_delay > 0);  // p = 0.2 leaves some entries stale
  }
}
