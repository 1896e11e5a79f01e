#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdpiag/config.hpp"

#include <random>

using namespace pdpiag;

TEST_CASE("minimal config applies all defaults") {
  ExperimentConfig config = parse_config(
      "problem.family = quadratic-quadratic\n"
      "solver.variant = thm1\n");
  CHECK(config.problem.d1 == 10);
  CHECK(config.problem.d2 == 10);
  CHECK(config.problem.N == 5);
  CHECK(config.problem.seed == 1);
  CHECK_FALSE(config.solver.sigma.has_value());
  CHECK_FALSE(config.solver.tau.has_value());
  CHECK(config.solver.schedule.kind == "cyclic");
  CHECK(config.analysis.gap_checkpoints == std::vector<std::int64_t>{10, 100, 1000});
  CHECK(config.output.trace_path == "trace.csv");
  CHECK_FALSE(config.output.timing);
}

TEST_CASE("comments and blank lines are ignored") {
  ExperimentConfig config = parse_config(
      "# an experiment\n"
      "\n"
      "problem.family = lasso-dual   # dual of the l1 problem\n"
      "problem.d1 = 6\n"
      "problem.d2 = 6\n"
      "solver.variant = thm1\n");
  CHECK(config.problem.family == "lasso-dual");
  CHECK(config.problem.d1 == 6);
}

TEST_CASE("schema violations name the key and line") {
  SUBCASE("negative sigma") {
    try {
      parse_config("solver.sigma = -1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      std::string message = e.what();
      CHECK(message.find("solver.sigma") != std::string::npos);
      CHECK(message.find("positive") != std::string::npos);
      CHECK(message.find("line 1") != std::string::npos);
    }
  }
  SUBCASE("unknown key") {
    try {
      parse_config("problem.family = quadratic-quadratic\nsolver.stepsize = 0.1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      std::string message = e.what();
      CHECK(message.find("solver.stepsize") != std::string::npos);
      CHECK(message.find("unknown key") != std::string::npos);
      CHECK(message.find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed line") {
    CHECK_THROWS_AS(parse_config("just some words\n"), ConfigError);
  }
  SUBCASE("bad enum values") {
    CHECK_THROWS_AS(parse_config("problem.family = rosenbrock\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.variant = thm9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.schedule = fancy\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("analysis.monitors = everything\n"), ConfigError);
  }
  SUBCASE("range checks") {
    CHECK_THROWS_AS(parse_config("problem.d1 = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem.gamma = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.p = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.theta = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.max_iters = 0\n"), ConfigError);
  }
  SUBCASE("cross-field constraints") {
    CHECK_THROWS_AS(parse_config("problem.family = lasso-dual\nproblem.d1 = 4\nproblem.d2 = 5\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("solver.variant = thm1\nsolver.theta = 0.9\n"), ConfigError);
  }
}

TEST_CASE("round-trip: parse, serialize, parse is the identity") {
  const char* texts[] = {
      "problem.family = quadratic-quadratic\nsolver.variant = thm1\n",
      "problem.family = lasso-dual\n"
      "problem.d1 = 7\nproblem.d2 = 7\nproblem.N = 3\nproblem.seed = 42\n"
      "problem.lambda = 0.25\nproblem.rows_per_block = 2\n"
      "solver.variant = thm1\nsolver.sigma = 0.0125\nsolver.tau = 0.05\n"
      "solver.max_iters = 500\nsolver.force = true\n"
      "solver.schedule = random_bounded\nsolver.T = 3\nsolver.p = 0.25\n"
      "solver.schedule_seed = 99\n"
      "analysis.gap_checkpoints = 5,50\nanalysis.boxes = halfwidth:2.5\n"
      "analysis.monitors = gap\nanalysis.convergence_tol = 1e-7\n"
      "output.trace = t.csv\noutput.summary = s.json\noutput.plotdata = p.dat\n"
      "output.timing = false\n",
      "solver.variant = thm2\nsolver.theta = 0.9375\nproblem.gamma = 0.5\n",
      "analysis.gap_checkpoints = none\nanalysis.monitors = none\n",
  };
  for (const char* text : texts) {
    ExperimentConfig once = parse_config(text);
    std::string canonical = serialize_config(once);
    ExperimentConfig twice = parse_config(canonical);
    CHECK(once == twice);
    CHECK(serialize_config(twice) == canonical);
  }
}

TEST_CASE("random configs survive the round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ExperimentConfig config;
    config.problem.family = unif(rng) < 0.5 ? "quadratic-quadratic" : "lasso-dual";
    config.problem.d1 = 1 + static_cast<int>(unif(rng) * 20);
    config.problem.d2 =
        config.problem.family == "lasso-dual" ? config.problem.d1 : 1 + static_cast<int>(unif(rng) * 20);
    config.problem.N = 1 + static_cast<int>(unif(rng) * 8);
    config.problem.seed = static_cast<std::uint64_t>(unif(rng) * 1e9);
    config.problem.gamma = 0.1 + unif(rng);
    config.problem.conditioning = 1.0 + unif(rng) * 20;
    config.problem.lambda = 0.1 + unif(rng);
    config.solver.variant = unif(rng) < 0.4 ? "thm1" : (unif(rng) < 0.5 ? "thm2" : "thm3");
    if (unif(rng) < 0.5) {
      config.solver.sigma = 0.9999 * unif(rng) + 1e-6;
      config.solver.tau = 0.9999 * unif(rng) + 1e-6;
    }
    if (config.solver.variant == "thm2" && unif(rng) < 0.5) config.solver.theta = 0.5 + 0.5 * unif(rng);
    config.solver.max_iters = 1 + static_cast<std::int64_t>(unif(rng) * 10000);
    config.solver.force = unif(rng) < 0.3;
    config.solver.schedule.kind =
        unif(rng) < 0.4 ? "cyclic" : (unif(rng) < 0.5 ? "random_bounded" : "constant");
    config.solver.schedule.T = static_cast<int>(unif(rng) * 6);
    config.solver.schedule.p = unif(rng);
    if (unif(rng) < 0.5) config.solver.schedule.seed = static_cast<std::uint64_t>(unif(rng) * 1e6);
    config.analysis.gap_checkpoints.clear();
    for (int c = 1; c <= static_cast<int>(unif(rng) * 4); ++c) {
      config.analysis.gap_checkpoints.push_back(c * 10);
    }
    if (unif(rng) < 0.4) config.analysis.box_halfwidth = 1.0 + unif(rng) * 5;
    ExperimentConfig reparsed = parse_config(serialize_config(config));
    CHECK(reparsed == config);
  }
}

TEST_CASE("JSON is accepted as an alternative encoding") {
  ExperimentConfig config = parse_config(R"({
    "problem": {"family": "quadratic-quadratic", "d1": 4, "d2": 3, "N": 2, "seed": 7, "gamma": 0.5},
    "solver": {"variant": "thm2", "sigma": 0.01, "tau": 0.02, "theta": "auto",
               "max_iters": 250, "schedule": "constant", "T": 2},
    "analysis": {"gap_checkpoints": [10, 50], "monitors": ["linear"]},
    "output": {"trace": "out.csv"}
  })");
  CHECK(config.problem.d1 == 4);
  CHECK(config.problem.gamma == 0.5);
  CHECK(config.solver.variant == "thm2");
  CHECK(config.solver.sigma == doctest::Approx(0.01));
  CHECK_FALSE(config.solver.theta.has_value());
  CHECK(config.solver.schedule.kind == "constant");
  CHECK(config.solver.schedule.T == 2);
  CHECK(config.analysis.gap_checkpoints == std::vector<std::int64_t>{10, 50});
  CHECK(config.analysis.monitors == std::vector<std::string>{"linear"});
  CHECK(config.output.trace_path == "out.csv");

  // the same config through the canonical encoding parses identically
  ExperimentConfig reparsed = parse_config(serialize_config(config));
  CHECK(reparsed == config);

  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"blurb": 1}})"), ConfigError);
}
