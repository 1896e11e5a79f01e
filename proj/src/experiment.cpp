#include "pdpiag/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

namespace pdpiag {

namespace fs = std::filesystem;

SaddleProblem build_problem(const ProblemConfig& config) {
  if (config.family == "quadratic-quadratic") {
    catalog::QuadraticQuadraticParams params;
    params.d1 = config.d1;
    params.d2 = config.d2;
    params.N = config.N;
    params.seed = config.seed;
    params.gamma = config.gamma;
    params.conditioning = config.conditioning;
    return catalog::quadratic_quadratic(params);
  }
  if (config.family == "lasso-dual") {
    catalog::LassoDualParams params;
    params.d1 = config.d1;
    params.N = config.N;
    params.rows_per_block = config.rows_per_block;
    params.seed = config.seed;
    params.lambda = config.lambda;
    return catalog::lasso_dual(params);
  }
  throw ConfigError("config error at 'problem.family': unknown family '" + config.family + "'");
}

DelaySchedule build_schedule(const ScheduleConfig& config, std::uint64_t default_seed) {
  if (config.kind == "cyclic") return DelaySchedule::cyclic();
  if (config.kind == "constant") return DelaySchedule::constant(config.T);
  if (config.kind == "random_bounded") {
    return DelaySchedule::random_bounded(config.T, config.p, config.seed.value_or(default_seed));
  }
  throw ConfigError("config error at 'solver.schedule': unknown schedule '" + config.kind + "'");
}

StepSelection select_steps(const ExperimentConfig& config, const SaddleProblem& problem,
                           int effective_T) {
  const Variant variant = variant_from_name(config.solver.variant);
  StepSelection sel;
  if (!config.solver.sigma.has_value() || !config.solver.tau.has_value()) {
    if (config.solver.sigma.has_value() != config.solver.tau.has_value()) {
      throw ConfigError("config error at 'solver.sigma': sigma and tau must both be explicit or both auto");
    }
    AutoStepResult auto_result =
        auto_stepsize(problem, effective_T, variant, config.solver.step_ratio);
    sel.sigma = auto_result.sigma;
    sel.tau = auto_result.tau;
    sel.theta = config.solver.theta.has_value() ? config.solver.theta : auto_result.theta;
    if (variant == Variant::thm2 && config.solver.theta.has_value()) {
      // Re-certify with the user's theta instead of the auto midpoint.
      auto_result.certificate =
          certify_thm2(sel.sigma, sel.tau, *sel.theta, problem.delta(), problem.gamma(),
                       problem.L(), effective_T, problem.K_norm());
    }
    sel.certificate = auto_result.certificate;
    sel.auto_selected = true;
    return sel;
  }

  sel.sigma = *config.solver.sigma;
  sel.tau = *config.solver.tau;
  switch (variant) {
    case Variant::thm1:
      sel.certificate = certify_thm1(sel.sigma, sel.tau, problem.K_norm(), problem.L(), effective_T);
      break;
    case Variant::thm2: {
      double theta;
      if (config.solver.theta.has_value()) {
        theta = *config.solver.theta;
      } else {
        auto [theta_min, theta_max] = theta_range(sel.sigma, sel.tau, problem.delta(), problem.gamma());
        theta = 0.5 * (theta_min + theta_max);
      }
      sel.theta = theta;
      sel.certificate = certify_thm2(sel.sigma, sel.tau, theta, problem.delta(), problem.gamma(),
                                     problem.L(), effective_T, problem.K_norm());
      break;
    }
    case Variant::thm3:
      sel.certificate =
          certify_thm3(sel.sigma, sel.tau, problem.L(), effective_T, problem.K_norm(), problem.delta());
      break;
  }
  return sel;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

namespace {

nlohmann::ordered_json certificate_json(const StepSizeCertificate& cert) {
  nlohmann::ordered_json j;
  j["theorem"] = variant_name(cert.variant);
  j["sigma"] = cert.sigma;
  j["tau"] = cert.tau;
  if (cert.theta.has_value()) {
    j["theta"] = *cert.theta;
  } else {
    j["theta"] = nullptr;
  }
  j["T"] = cert.T;
  j["K_norm"] = cert.K_norm;
  j["L"] = cert.L;
  j["delta"] = cert.delta;
  j["gamma"] = cert.gamma;
  j["satisfied"] = cert.satisfied();
  nlohmann::ordered_json conditions = nlohmann::ordered_json::array();
  for (const auto& c : cert.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["lhs"] = c.lhs;
    cj["rhs"] = c.rhs;
    cj["strict"] = c.strict;
    cj["satisfied"] = c.satisfied;
    cj["slack"] = c.slack;
    conditions.push_back(cj);
  }
  j["conditions"] = conditions;
  return j;
}

nlohmann::ordered_json monitor_json(const MonitorReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["pass"] = report.pass;
  j["checks"] = report.checks;
  j["violations"] = report.violations;
  j["first_violation"] = report.first_violation;
  j["worst_violation"] = report.worst_violation;
  return j;
}

nlohmann::ordered_json gap_series_json(const GapSeries& series) {
  nlohmann::ordered_json j;
  j["name"] = series.name;
  j["pass"] = series.pass;
  j["exact"] = series.exact;
  j["checkpoints"] = series.checkpoints;
  j["gap"] = series.gap;
  j["bound"] = series.bound;
  j["achieved_tol"] = series.achieved_tol;
  return j;
}

double json_safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

std::optional<SaddleCertificate> analytic_saddle(const SaddleProblem& problem) {
  if (!problem.f_structure || !problem.dual_structure ||
      problem.dual_structure->kind != DualKind::quadratic) {
    return std::nullopt;
  }
  Matrix A = problem.f_structure->diag.asDiagonal();
  return saddle_quadratic(A, problem.f_structure->lin, problem.coupling().matrix(),
                          problem.dual_structure->gamma);
}

std::pair<BoxSet, BoxSet> make_boxes(const std::optional<double>& halfwidth,
                                     const Vector& center_x, const Vector& center_y,
                                     const Vector& x0, const Vector& y0) {
  double w = halfwidth.value_or(
      4.0 * std::max({(x0 - center_x).norm(), (y0 - center_y).norm(), 1.0}));
  return {BoxSet::centered(center_x, w), BoxSet::centered(center_y, w)};
}

std::vector<std::string> expand_monitors(const std::vector<std::string>& requested,
                                         Variant variant, bool has_saddle,
                                         bool has_checkpoints) {
  std::vector<std::string> monitors;
  auto add = [&monitors](const std::string& name) {
    for (const auto& m : monitors) {
      if (m == name) return;
    }
    monitors.push_back(name);
  };
  for (const auto& name : requested) {
    if (name == "auto") {
      switch (variant) {
        case Variant::thm1:
        case Variant::thm3:
          if (has_saddle) add("boundedness");
          if (has_checkpoints) add("gap");
          break;
        case Variant::thm2:
          if (has_saddle) add("linear");
          break;
      }
    } else {
      if ((name == "boundedness" || name == "linear" || name == "convergence") && !has_saddle) {
        throw ConfigError("config error at 'analysis.monitors': monitor '" + name +
                          "' needs an analytic saddle point (quadratic-quadratic family)");
      }
      add(name);
    }
  }
  return monitors;
}

std::string plotdata_text(const ConvergenceTrace& trace, const std::vector<GapSeries>& gap_series) {
  std::string out = "# k dist_x dist_y V_k thm_bound\n";
  auto field = [](double v) { return std::isnan(v) ? std::string("nan") : format_double(v); };
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.k);
    out += " " + field(rec.dist_x);
    out += " " + field(rec.dist_y);
    out += " " + field(rec.V);
    out += " " + field(rec.thm_bound);
    out += "\n";
  }
  for (const auto& series : gap_series) {
    out += "\n\n# " + series.name + ": M gap gap_bound achieved_tol\n";
    for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
      out += std::to_string(series.checkpoints[i]);
      out += " " + field(series.gap[i]);
      out += " " + field(series.bound[i]);
      out += " " + field(series.achieved_tol[i]);
      out += "\n";
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  ExperimentResult result;
  result.config = config;

  nlohmann::ordered_json& summary = result.summary;
  summary["config"] = serialize_config(config);
  summary["seed"] = config.problem.seed;
  summary["variant"] = config.solver.variant;

  const fs::path dir(out_dir);
  auto out_path = [&dir](const std::string& rel) { return (dir / rel).string(); };
  auto finish = [&](int code) {
    result.exit_code = code;
    summary["exit_code"] = code;
    atomic_write_file(out_path(config.output.summary_path), summary.dump(2) + "\n");
    return result;
  };

  SaddleProblem problem = build_problem(config.problem);
  DelaySchedule schedule = build_schedule(config.solver.schedule, config.problem.seed + 1);
  const int effective_T = schedule.effective_delay_bound(problem.num_components());
  const Variant variant = variant_from_name(config.solver.variant);

  summary["constants"] = {{"L", problem.L()},
                          {"delta", problem.delta()},
                          {"gamma", problem.gamma()},
                          {"K_norm", problem.K_norm()},
                          {"effective_T", effective_T}};

  StepSelection steps;
  try {
    steps = select_steps(config, problem, effective_T);
  } catch (const infeasible_error& e) {
    summary["error"] = e.what();
    return finish(kExitInfeasible);
  }
  summary["certificate"] = certificate_json(steps.certificate);
  summary["certified"] = steps.certificate.satisfied();
  summary["forced"] = config.solver.force && !steps.certificate.satisfied();
  if (!steps.certificate.satisfied() && !config.solver.force) {
    summary["error"] = "step sizes fail certification; pass force=true to run anyway";
    return finish(kExitVerifyFail);
  }

  ExtrapolationRule rule = ExtrapolationRule::pdhg();
  if (variant == Variant::thm2) rule = ExtrapolationRule::with_theta(steps.theta.value_or(1.0));
  if (variant == Variant::thm3) rule = ExtrapolationRule::arrow_hurwicz();

  const Vector x0 = Vector::Zero(problem.d1());
  const Vector y0 = Vector::Zero(problem.d2());

  RunOptions options;
  options.max_iters = config.solver.max_iters;
  options.record_timing = config.output.timing;
  result.trace = run(problem, x0, y0, steps.sigma, steps.tau, rule, schedule, options);
  result.trace.seed = config.problem.seed;
  result.trace.certificate = steps.certificate;
  result.trace.config_echo = serialize_config(config);

  result.saddle = analytic_saddle(problem);

  // Rate/bound constants available for annotation and monitors.
  std::optional<double> C;
  if (steps.tau * steps.sigma * problem.K_norm() * problem.K_norm() < 1.0) {
    C = compute_C(steps.sigma, steps.tau, problem.K_norm());
  }
  std::optional<RateConstants> rate;
  if (variant == Variant::thm2 && steps.theta.has_value()) {
    try {
      rate = compute_a_omega(*steps.theta, steps.sigma, steps.tau, problem.delta(),
                             problem.gamma(), problem.K_norm(), problem.L(), effective_T);
    } catch (const std::exception&) {
      rate.reset();  // uncertified forced run outside the admissible range
    }
  }

  if (result.saddle) {
    annotate_distances(result.trace, *result.saddle, steps.sigma, steps.tau);
    double V0 = result.trace.records.front().V;
    if (variant == Variant::thm2 && rate) {
      double decay = 1.0;
      for (auto& rec : result.trace.records) {
        rec.thm_bound = decay * V0;
        decay *= rate->omega;
      }
    } else if (C) {
      for (auto& rec : result.trace.records) rec.thm_bound = *C * V0;
    }
  }

  nlohmann::ordered_json constants = summary["constants"];
  constants["sigma"] = steps.sigma;
  constants["tau"] = steps.tau;
  if (steps.theta) constants["theta"] = *steps.theta;
  if (C) constants["C"] = *C;
  if (rate) {
    constants["a"] = rate->a;
    constants["omega"] = rate->omega;
    constants["theta_min"] = rate->theta_min;
  }
  summary["constants"] = constants;

  const TraceRecord& last = result.trace.records.back();
  auto [primal_res, dual_res] = saddle_residual(problem, last.x, last.y);
  double sup_dist_x = std::numeric_limits<double>::quiet_NaN();
  if (result.saddle) {
    sup_dist_x = 0.0;
    for (const auto& rec : result.trace.records) sup_dist_x = std::max(sup_dist_x, rec.dist_x);
  }

  summary["run"] = {{"iterations", result.trace.iterations()},
                    {"termination", result.trace.termination},
                    {"final_dist_x", json_safe(last.dist_x)},
                    {"final_dist_y", json_safe(last.dist_y)},
                    {"final_primal_residual", primal_res},
                    {"final_dual_residual", dual_res},
                    {"sup_dist_x", json_safe(sup_dist_x)},
                    {"empirical_rate", json_safe(empirical_log_rate(lyapunov_series(result.trace)))}};
  if (result.saddle) {
    summary["saddle"] = {{"available", true},
                         {"primal_residual", result.saddle->primal_residual},
                         {"dual_residual", result.saddle->dual_residual}};
  } else {
    summary["saddle"] = {{"available", false}};
  }

  auto write_artifacts = [&] {
    atomic_write_file(out_path(config.output.trace_path), trace_to_csv(result.trace));
    atomic_write_file(out_path(config.output.plotdata_path),
                      plotdata_text(result.trace, result.gap_series));
  };

  if (result.trace.termination == "diverged") {
    summary["monitors"] = nlohmann::ordered_json::array();
    summary["gap"] = nlohmann::ordered_json::array();
    write_artifacts();
    return finish(kExitDiverged);
  }

  // Boxes and oracle for the gap monitors.
  Vector center_x = result.saddle ? result.saddle->x_hat : last.x;
  Vector center_y = result.saddle ? result.saddle->y_hat : last.y;
  auto [B1, B2] = make_boxes(config.analysis.box_halfwidth, center_x, center_y, x0, y0);
  GapOracle oracle = (problem.f_structure && problem.dual_structure)
                         ? GapOracle::exact()
                         : GapOracle::projected();

  std::vector<std::string> monitors =
      expand_monitors(config.analysis.monitors, variant, result.saddle.has_value(),
                      !config.analysis.gap_checkpoints.empty());

  bool all_pass = true;
  nlohmann::ordered_json monitors_json = nlohmann::ordered_json::array();
  nlohmann::ordered_json gap_json = nlohmann::ordered_json::array();
  for (const auto& name : monitors) {
    if (name == "boundedness") {
      if (!C) {
        nlohmann::ordered_json j;
        j["name"] = "thm1_boundedness";
        j["skipped"] = "C undefined (tau*sigma*||K||^2 >= 1)";
        monitors_json.push_back(j);
        continue;
      }
      MonitorReport report =
          monitor_thm1_boundedness(result.trace, *C, *result.saddle, steps.sigma, steps.tau);
      all_pass = all_pass && report.pass;
      monitors_json.push_back(monitor_json(report));
      result.monitor_reports.push_back(std::move(report));
    } else if (name == "linear") {
      if (!rate) {
        nlohmann::ordered_json j;
        j["name"] = "thm2_linear";
        j["skipped"] = "rate constants unavailable (uncertified parameters)";
        monitors_json.push_back(j);
        continue;
      }
      MonitorReport report = monitor_thm2_linear(result.trace, rate->omega, *result.saddle,
                                                 steps.sigma, steps.tau, problem.K_norm());
      all_pass = all_pass && report.pass;
      monitors_json.push_back(monitor_json(report));
      result.monitor_reports.push_back(std::move(report));
    } else if (name == "convergence") {
      MonitorReport report;
      report.name = "convergence";
      report.checks = 1;
      double final_dist = std::hypot(last.dist_x, last.dist_y);
      report.pass = final_dist <= config.analysis.convergence_tol;
      if (!report.pass) {
        report.violations = 1;
        report.first_violation = last.k;
        report.worst_violation = final_dist - config.analysis.convergence_tol;
      }
      all_pass = all_pass && report.pass;
      monitors_json.push_back(monitor_json(report));
      result.monitor_reports.push_back(std::move(report));
    } else if (name == "gap") {
      GapSeries series = (variant == Variant::thm3)
                             ? monitor_thm3_gap(result.trace, problem, B1, B2, oracle, x0, y0,
                                                steps.sigma, steps.tau, config.analysis.gap_checkpoints)
                             : monitor_thm1_gap(result.trace, problem, B1, B2, oracle, x0, y0,
                                                steps.sigma, steps.tau, config.analysis.gap_checkpoints);
      all_pass = all_pass && series.pass;
      // surface checkpoint values in the trace records
      for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
        auto& rec = result.trace.records[static_cast<std::size_t>(series.checkpoints[i])];
        rec.gap = series.gap[i];
        rec.gap_bound = series.bound[i];
      }
      gap_json.push_back(gap_series_json(series));
      result.gap_series.push_back(std::move(series));
    }
  }
  summary["monitors"] = monitors_json;
  summary["gap"] = gap_json;

  write_artifacts();
  return finish(all_pass ? kExitPass : kExitVerifyFail);
}

CertifyResult certify(const ExperimentConfig& config) {
  CertifyResult result;
  SaddleProblem problem = build_problem(config.problem);
  DelaySchedule schedule = build_schedule(config.solver.schedule, config.problem.seed + 1);
  const int effective_T = schedule.effective_delay_bound(problem.num_components());

  StepSelection steps;
  try {
    steps = select_steps(config, problem, effective_T);
  } catch (const infeasible_error& e) {
    result.exit_code = kExitInfeasible;
    result.text = std::string("infeasible: ") + e.what() + "\n";
    return result;
  }
  result.certificate = steps.certificate;

  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s  sigma=%.10g  tau=%.10g", variant_name(steps.certificate.variant).c_str(),
                steps.sigma, steps.tau);
  result.text = buf;
  if (steps.theta) {
    std::snprintf(buf, sizeof(buf), "  theta=%.10g", *steps.theta);
    result.text += buf;
  }
  std::snprintf(buf, sizeof(buf), "  T=%d  ||K||=%.10g  L=%.10g\n", steps.certificate.T,
                steps.certificate.K_norm, steps.certificate.L);
  result.text += buf;
  for (const auto& c : steps.certificate.checks) {
    std::snprintf(buf, sizeof(buf), "  %-18s lhs=%-22.15g %s rhs=%-22.15g slack=%-.15g  [%s]\n",
                  c.name.c_str(), c.lhs, c.strict ? "< " : "<=", c.rhs, c.slack,
                  c.satisfied ? "ok" : "FAIL");
    result.text += buf;
  }
  result.text += steps.certificate.satisfied() ? "certificate: PASS\n" : "certificate: FAIL\n";
  result.exit_code = steps.certificate.satisfied() ? kExitPass : kExitVerifyFail;
  return result;
}

ExperimentConfig apply_axis_value(const ExperimentConfig& base, const std::string& axis,
                                  double value) {
  ExperimentConfig config = base;
  auto as_int = [&](const char* what) {
    double r = std::round(value);
    if (std::abs(r - value) > 1e-9) {
      throw ConfigError(std::string("sweep axis '") + what + "' needs integer values");
    }
    return static_cast<std::int64_t>(r);
  };
  if (axis == "T") {
    if (config.solver.schedule.kind == "cyclic") {
      throw ConfigError("sweep axis 'T' needs a random_bounded or constant schedule");
    }
    config.solver.schedule.T = static_cast<int>(as_int("T"));
  } else if (axis == "sigma") {
    config.solver.sigma = value;
  } else if (axis == "tau") {
    config.solver.tau = value;
  } else if (axis == "theta") {
    config.solver.theta = value;
  } else if (axis == "N") {
    config.problem.N = static_cast<int>(as_int("N"));
  } else if (axis == "max_iters") {
    config.solver.max_iters = as_int("max_iters");
  } else if (axis == "gamma") {
    config.problem.gamma = value;
  } else if (axis == "lambda") {
    config.problem.lambda = value;
  } else if (axis == "conditioning") {
    config.problem.conditioning = value;
  } else if (axis == "p") {
    config.solver.schedule.p = value;
  } else if (axis == "seed") {
    config.problem.seed = static_cast<std::uint64_t>(as_int("seed"));
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  return config;
}

SweepResult sweep(const ExperimentConfig& base, const std::string& axis,
                  const std::vector<double>& values, const std::string& out_dir, int workers) {
  if (values.empty()) throw ConfigError("sweep: needs at least one value");
  // Validate the axis up front so a bad name fails fast.
  apply_axis_value(base, axis, values.front());

  SweepResult result;
  result.axis = axis;
  result.rows.resize(values.size());

  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(values.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SweepRow& row = result.rows[i];
      row.value = values[i];
      std::string run_dir =
          (fs::path(out_dir) / ("run_" + axis + "_" + std::to_string(i))).string();
      try {
        ExperimentConfig config = apply_axis_value(base, axis, values[i]);
        ExperimentResult run_result = run_experiment(config, run_dir);
        row.exit_code = run_result.exit_code;
        const auto& summary = run_result.summary;
        row.certified = summary.value("certified", false);
        if (summary.contains("constants")) {
          const auto& constants = summary["constants"];
          row.sigma = constants.value("sigma", 0.0);
          row.tau = constants.value("tau", 0.0);
          row.theta = constants.value("theta", std::numeric_limits<double>::quiet_NaN());
          row.min_slack = run_result.summary.contains("certificate")
                              ? run_result.trace.certificate
                                    ? run_result.trace.certificate->min_slack()
                                    : std::numeric_limits<double>::quiet_NaN()
                              : std::numeric_limits<double>::quiet_NaN();
        }
        if (summary.contains("run")) {
          const auto& run_info = summary["run"];
          row.final_dist_x = run_info.value("final_dist_x", std::numeric_limits<double>::quiet_NaN());
          row.final_dist_y = run_info.value("final_dist_y", std::numeric_limits<double>::quiet_NaN());
          row.final_primal_residual =
              run_info.value("final_primal_residual", std::numeric_limits<double>::quiet_NaN());
          row.final_dual_residual =
              run_info.value("final_dual_residual", std::numeric_limits<double>::quiet_NaN());
          row.empirical_rate =
              run_info.value("empirical_rate", std::numeric_limits<double>::quiet_NaN());
          row.iterations = run_info.value("iterations", static_cast<std::int64_t>(0));
          row.termination = run_info.value("termination", std::string());
        }
      } catch (const std::exception& e) {
        row.exit_code = kExitParseError;
        row.termination = std::string("error: ") + e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv =
      "axis,value,exit,certified,sigma,tau,theta,min_slack,final_dist_x,final_dist_y,"
      "final_primal_residual,final_dual_residual,empirical_rate,iterations,termination\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& row : result.rows) {
    csv += axis;
    csv += "," + format_double(row.value);
    csv += "," + std::to_string(row.exit_code);
    csv += row.certified ? ",true" : ",false";
    csv += "," + field(row.sigma);
    csv += "," + field(row.tau);
    csv += "," + field(row.theta);
    csv += "," + field(row.min_slack);
    csv += "," + field(row.final_dist_x);
    csv += "," + field(row.final_dist_y);
    csv += "," + field(row.final_primal_residual);
    csv += "," + field(row.final_dual_residual);
    csv += "," + field(row.empirical_rate);
    csv += "," + std::to_string(row.iterations);
    csv += "," + row.termination;
    csv += "\n";
  }
  result.csv_path = (fs::path(out_dir) / ("sweep_" + axis + ".csv")).string();
  atomic_write_file(result.csv_path, csv);
  return result;
}

GapAtResult gap_at(const ExperimentConfig& config, const Vector& x, const Vector& y) {
  SaddleProblem problem = build_problem(config.problem);
  if (x.size() != problem.d1() || y.size() != problem.d2()) {
    throw ConfigError("gap: iterate dimensions disagree with the problem");
  }
  std::optional<SaddleCertificate> saddle = analytic_saddle(problem);
  Vector center_x = saddle ? saddle->x_hat : x;
  Vector center_y = saddle ? saddle->y_hat : y;
  double default_width =
      4.0 * std::max({(x - center_x).norm(), (y - center_y).norm(), x.norm(), y.norm(), 1.0});
  double w = config.analysis.box_halfwidth.value_or(default_width);
  BoxSet B1 = BoxSet::centered(center_x, w);
  BoxSet B2 = BoxSet::centered(center_y, w);
  GapOracle oracle = (problem.f_structure && problem.dual_structure) ? GapOracle::exact()
                                                                     : GapOracle::projected();
  GapAtResult result{partial_gap(problem, B1, B2, x, y, oracle), B1, B2};
  return result;
}

}  // namespace pdpiag
