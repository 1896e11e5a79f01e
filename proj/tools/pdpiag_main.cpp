#include "pdpiag/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace pdpiag;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Environment overrides mirror the flags with the PDPIAG_ prefix.
std::optional<std::string> env_override(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  bool force = false;
  std::string out_dir = ".";
  int workers = 0;
};

void apply_common(ExperimentConfig& config, const CommonFlags& flags) {
  if (flags.seed) config.problem.seed = *flags.seed;
  if (flags.force) config.solver.force = true;
}

CommonFlags resolve_env(CommonFlags flags, bool out_dir_set, bool workers_set, bool seed_set,
                        bool force_set) {
  if (!seed_set) {
    if (auto v = env_override("PDPIAG_SEED")) flags.seed = std::stoull(*v);
  }
  if (!force_set) {
    if (auto v = env_override("PDPIAG_FORCE")) flags.force = (*v == "1" || *v == "true");
  }
  if (!out_dir_set) {
    if (auto v = env_override("PDPIAG_OUT_DIR")) flags.out_dir = *v;
  }
  if (!workers_set) {
    if (auto v = env_override("PDPIAG_WORKERS")) flags.workers = std::stoi(*v);
  }
  return flags;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  if (values.empty()) throw ConfigError("--values: expected a comma-separated list of numbers");
  return values;
}

std::pair<Vector, Vector> read_iterate_file(const std::string& path, int d1, int d2) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open iterate file: " + path);
  std::vector<double> numbers;
  double v;
  while (in >> v) numbers.push_back(v);
  if (static_cast<int>(numbers.size()) != d1 + d2) {
    throw ConfigError("iterate file must hold d1 + d2 = " + std::to_string(d1 + d2) +
                      " numbers, got " + std::to_string(numbers.size()));
  }
  Vector x(d1);
  Vector y(d2);
  for (int i = 0; i < d1; ++i) x[i] = numbers[static_cast<std::size_t>(i)];
  for (int i = 0; i < d2; ++i) y[i] = numbers[static_cast<std::size_t>(d1 + i)];
  return {x, y};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PD-PIAG saddle-point solver benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  CommonFlags flags;
  bool seed_set = false;
  bool force_set = false;
  bool out_dir_set = false;
  bool workers_set = false;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment config file")->required();
    cmd->add_option("--seed", seed_value, "override problem.seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_flag("--force", flags.force, "run despite a failed certificate")
        ->each([&](const std::string&) { force_set = true; });
    cmd->add_option("--out-dir", flags.out_dir, "directory for emitted artifacts")
        ->each([&](const std::string&) { out_dir_set = true; });
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one experiment and write artifacts");
  add_common(cmd_run);

  CLI::App* cmd_certify = app.add_subcommand("certify", "print the step-size certificate");
  add_common(cmd_certify);

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run one experiment per axis value");
  add_common(cmd_sweep);
  std::string axis;
  std::string values_list;
  cmd_sweep->add_option("--axis", axis, "config field to sweep")->required();
  cmd_sweep->add_option("--values", values_list, "comma-separated values")->required();
  cmd_sweep->add_option("--workers", flags.workers, "parallel runs (default: hardware)")
      ->each([&](const std::string&) { workers_set = true; });

  CLI::App* cmd_gap = app.add_subcommand("gap", "restricted primal-dual gap at a stored iterate");
  add_common(cmd_gap);
  std::string iterate_path;
  cmd_gap->add_option("--at", iterate_path, "file with d1 + d2 whitespace-separated numbers")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    flags = resolve_env(flags, out_dir_set, workers_set, seed_set, force_set);
    if (seed_set) flags.seed = seed_value;

    ExperimentConfig config = parse_config(read_file(config_path));
    apply_common(config, flags);

    if (cmd_run->parsed()) {
      ExperimentResult result = run_experiment(config, flags.out_dir);
      std::cout << "exit " << result.exit_code << " (" << result.trace.termination << ", "
                << result.trace.iterations() << " iterations)\n";
      return result.exit_code;
    }
    if (cmd_certify->parsed()) {
      CertifyResult result = certify(config);
      std::cout << result.text;
      return result.exit_code;
    }
    if (cmd_sweep->parsed()) {
      SweepResult result = sweep(config, axis, parse_values(values_list), flags.out_dir,
                                 flags.workers);
      std::cout << "sweep over " << axis << ": " << result.rows.size() << " runs -> "
                << result.csv_path << "\n";
      int exit_code = kExitPass;
      for (const auto& row : result.rows) exit_code = std::max(exit_code, row.exit_code);
      return exit_code;
    }
    if (cmd_gap->parsed()) {
      SaddleProblem probe = build_problem(config.problem);
      auto [x, y] = read_iterate_file(iterate_path, probe.d1(), probe.d2());
      GapAtResult result = gap_at(config, x, y);
      std::cout << "gap = " << format_double(result.gap.value)
                << " (achieved_tol = " << format_double(result.gap.achieved_tol)
                << (result.gap.exact ? ", exact" : ", projected-gradient")
                << (result.gap.point_in_box ? "" : ", point outside boxes") << ")\n";
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const infeasible_error& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  return kExitParseError;
}
