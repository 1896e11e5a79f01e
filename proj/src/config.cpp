#include "pdpiag/config.hpp"

#include "pdpiag/trace.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace pdpiag {

namespace {

[[noreturn]] void fail(const std::string& key, int line, const std::string& message) {
  std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
  throw ConfigError("config error at '" + key + "'" + where + ": " + message);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) fail(key, line, "not a number: '" + value + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, line, "not a number: '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value, int line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(key, line, "not an integer: '" + value + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(key, line, "not a nonnegative integer: '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(key, line, "expected true or false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, const std::string&, int)> apply;
};

const std::map<std::string, KeyHandler>& key_handlers() {
  static const std::map<std::string, KeyHandler> handlers = [] {
    std::map<std::string, KeyHandler> h;
    h["problem.family"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v != "quadratic-quadratic" && v != "lasso-dual") {
        fail("problem.family", line, "unknown family '" + v + "'");
      }
      c.problem.family = v;
    }};
    h["problem.d1"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto d = parse_int("problem.d1", v, line);
      if (d < 1) fail("problem.d1", line, "must be >= 1");
      c.problem.d1 = static_cast<int>(d);
    }};
    h["problem.d2"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto d = parse_int("problem.d2", v, line);
      if (d < 1) fail("problem.d2", line, "must be >= 1");
      c.problem.d2 = static_cast<int>(d);
    }};
    h["problem.N"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto n = parse_int("problem.N", v, line);
      if (n < 1) fail("problem.N", line, "must be >= 1");
      c.problem.N = static_cast<int>(n);
    }};
    h["problem.seed"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      c.problem.seed = parse_uint("problem.seed", v, line);
    }};
    h["problem.gamma"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double g = parse_double("problem.gamma", v, line);
      if (!(g > 0.0)) fail("problem.gamma", line, "gamma must be positive");
      c.problem.gamma = g;
    }};
    h["problem.conditioning"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double g = parse_double("problem.conditioning", v, line);
      if (!(g >= 1.0)) fail("problem.conditioning", line, "must be >= 1");
      c.problem.conditioning = g;
    }};
    h["problem.lambda"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double g = parse_double("problem.lambda", v, line);
      if (!(g > 0.0)) fail("problem.lambda", line, "lambda must be positive");
      c.problem.lambda = g;
    }};
    h["problem.rows_per_block"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto n = parse_int("problem.rows_per_block", v, line);
      if (n < 1) fail("problem.rows_per_block", line, "must be >= 1");
      c.problem.rows_per_block = static_cast<int>(n);
    }};
    h["solver.variant"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v != "thm1" && v != "thm2" && v != "thm3") {
        fail("solver.variant", line, "unknown variant '" + v + "'");
      }
      c.solver.variant = v;
    }};
    h["solver.sigma"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "auto") {
        c.solver.sigma.reset();
        return;
      }
      double s = parse_double("solver.sigma", v, line);
      if (!(s > 0.0)) fail("solver.sigma", line, "sigma must be positive");
      c.solver.sigma = s;
    }};
    h["solver.tau"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "auto") {
        c.solver.tau.reset();
        return;
      }
      double s = parse_double("solver.tau", v, line);
      if (!(s > 0.0)) fail("solver.tau", line, "tau must be positive");
      c.solver.tau = s;
    }};
    h["solver.theta"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "auto") {
        c.solver.theta.reset();
        return;
      }
      double s = parse_double("solver.theta", v, line);
      if (!(s > 0.0 && s <= 1.0)) fail("solver.theta", line, "theta must be in (0, 1]");
      c.solver.theta = s;
    }};
    h["solver.step_ratio"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double s = parse_double("solver.step_ratio", v, line);
      if (!(s > 0.0)) fail("solver.step_ratio", line, "must be positive");
      c.solver.step_ratio = s;
    }};
    h["solver.max_iters"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto n = parse_int("solver.max_iters", v, line);
      if (n < 1) fail("solver.max_iters", line, "must be >= 1");
      c.solver.max_iters = n;
    }};
    h["solver.force"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      c.solver.force = parse_bool("solver.force", v, line);
    }};
    h["solver.schedule"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v != "cyclic" && v != "random_bounded" && v != "constant") {
        fail("solver.schedule", line, "unknown schedule '" + v + "'");
      }
      c.solver.schedule.kind = v;
    }};
    h["solver.T"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      auto n = parse_int("solver.T", v, line);
      if (n < 0) fail("solver.T", line, "must be >= 0");
      c.solver.schedule.T = static_cast<int>(n);
    }};
    h["solver.p"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double s = parse_double("solver.p", v, line);
      if (!(s >= 0.0 && s <= 1.0)) fail("solver.p", line, "must be in [0, 1]");
      c.solver.schedule.p = s;
    }};
    h["solver.schedule_seed"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "auto") {
        c.solver.schedule.seed.reset();
        return;
      }
      c.solver.schedule.seed = parse_uint("solver.schedule_seed", v, line);
    }};
    h["analysis.gap_checkpoints"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      c.analysis.gap_checkpoints.clear();
      if (v == "none") return;
      for (const auto& item : split_list(v)) {
        auto n = parse_int("analysis.gap_checkpoints", item, line);
        if (n < 1) fail("analysis.gap_checkpoints", line, "checkpoints must be >= 1");
        c.analysis.gap_checkpoints.push_back(n);
      }
    }};
    h["analysis.boxes"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "auto") {
        c.analysis.box_halfwidth.reset();
        return;
      }
      const std::string prefix = "halfwidth:";
      if (v.rfind(prefix, 0) != 0) {
        fail("analysis.boxes", line, "expected auto or halfwidth:<value>");
      }
      double w = parse_double("analysis.boxes", v.substr(prefix.size()), line);
      if (!(w > 0.0)) fail("analysis.boxes", line, "half-width must be positive");
      c.analysis.box_halfwidth = w;
    }};
    h["analysis.monitors"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      c.analysis.monitors.clear();
      if (v == "none") return;
      for (const auto& item : split_list(v)) {
        if (item != "auto" && item != "boundedness" && item != "gap" && item != "linear" &&
            item != "convergence") {
          fail("analysis.monitors", line, "unknown monitor '" + item + "'");
        }
        c.analysis.monitors.push_back(item);
      }
    }};
    h["analysis.convergence_tol"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      double t = parse_double("analysis.convergence_tol", v, line);
      if (!(t > 0.0)) fail("analysis.convergence_tol", line, "must be positive");
      c.analysis.convergence_tol = t;
    }};
    h["output.trace"] = {[](ExperimentConfig& c, const std::string& v, int) {
      c.output.trace_path = v;
    }};
    h["output.summary"] = {[](ExperimentConfig& c, const std::string& v, int) {
      c.output.summary_path = v;
    }};
    h["output.plotdata"] = {[](ExperimentConfig& c, const std::string& v, int) {
      c.output.plotdata_path = v;
    }};
    h["output.timing"] = {[](ExperimentConfig& c, const std::string& v, int line) {
      c.output.timing = parse_bool("output.timing", v, line);
    }};
    return h;
  }();
  return handlers;
}

void apply_key(ExperimentConfig& config, const std::string& key, const std::string& value,
               int line) {
  auto it = key_handlers().find(key);
  if (it == key_handlers().end()) fail(key, line, "unknown key");
  it->second.apply(config, value, line);
}

void cross_validate(const ExperimentConfig& config) {
  if (config.problem.family == "lasso-dual" && config.problem.d2 != config.problem.d1) {
    throw ConfigError("config error at 'problem.d2': lasso-dual uses K = identity, so d2 must equal d1");
  }
  if (config.solver.variant != "thm2" && config.solver.theta.has_value()) {
    throw ConfigError("config error at 'solver.theta': theta applies to thm2 only");
  }
}

void flatten_json(const nlohmann::json& node, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [key, value] : node.items()) {
    std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten_json(value, full, out);
    } else if (value.is_string()) {
      out.emplace_back(full, value.get<std::string>());
    } else if (value.is_boolean()) {
      out.emplace_back(full, value.get<bool>() ? "true" : "false");
    } else if (value.is_number_integer()) {
      out.emplace_back(full, std::to_string(value.get<std::int64_t>()));
    } else if (value.is_number_unsigned()) {
      out.emplace_back(full, std::to_string(value.get<std::uint64_t>()));
    } else if (value.is_number_float()) {
      out.emplace_back(full, format_double(value.get<double>()));
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ",";
        if (item.is_string()) {
          joined += item.get<std::string>();
        } else if (item.is_number_integer()) {
          joined += std::to_string(item.get<std::int64_t>());
        } else if (item.is_number_float()) {
          joined += format_double(item.get<double>());
        } else {
          throw ConfigError("config error at '" + full + "': unsupported array element");
        }
      }
      out.emplace_back(full, joined.empty() ? "none" : joined);
    } else {
      throw ConfigError("config error at '" + full + "': unsupported value type");
    }
  }
}

ExperimentConfig parse_json_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config error: JSON root must be an object");
  std::vector<std::pair<std::string, std::string>> pairs;
  flatten_json(root, "", pairs);
  ExperimentConfig config;
  for (const auto& [key, value] : pairs) apply_key(config, key, value, 0);
  cross_validate(config);
  return config;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);

  ExperimentConfig config;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config error (line " + std::to_string(line) +
                        "): expected 'key = value', got '" + stripped + "'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("config error (line " + std::to_string(line) + "): empty key");
    if (value.empty()) fail(key, line, "empty value");
    apply_key(config, key, value, line);
  }
  cross_validate(config);
  return config;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto emit = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  auto opt_double = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("auto");
  };

  emit("problem.family", c.problem.family);
  emit("problem.d1", std::to_string(c.problem.d1));
  emit("problem.d2", std::to_string(c.problem.d2));
  emit("problem.N", std::to_string(c.problem.N));
  emit("problem.seed", std::to_string(c.problem.seed));
  emit("problem.gamma", format_double(c.problem.gamma));
  emit("problem.conditioning", format_double(c.problem.conditioning));
  emit("problem.lambda", format_double(c.problem.lambda));
  emit("problem.rows_per_block", std::to_string(c.problem.rows_per_block));
  emit("solver.variant", c.solver.variant);
  emit("solver.sigma", opt_double(c.solver.sigma));
  emit("solver.tau", opt_double(c.solver.tau));
  if (c.solver.variant == "thm2") emit("solver.theta", opt_double(c.solver.theta));
  emit("solver.step_ratio", format_double(c.solver.step_ratio));
  emit("solver.max_iters", std::to_string(c.solver.max_iters));
  emit("solver.force", c.solver.force ? "true" : "false");
  emit("solver.schedule", c.solver.schedule.kind);
  emit("solver.T", std::to_string(c.solver.schedule.T));
  emit("solver.p", format_double(c.solver.schedule.p));
  emit("solver.schedule_seed",
       c.solver.schedule.seed ? std::to_string(*c.solver.schedule.seed) : std::string("auto"));
  {
    std::string joined;
    for (auto cp : c.analysis.gap_checkpoints) {
      if (!joined.empty()) joined += ",";
      joined += std::to_string(cp);
    }
    emit("analysis.gap_checkpoints", joined.empty() ? "none" : joined);
  }
  emit("analysis.boxes", c.analysis.box_halfwidth
                             ? "halfwidth:" + format_double(*c.analysis.box_halfwidth)
                             : std::string("auto"));
  {
    std::string joined;
    for (const auto& m : c.analysis.monitors) {
      if (!joined.empty()) joined += ",";
      joined += m;
    }
    emit("analysis.monitors", joined.empty() ? "none" : joined);
  }
  emit("analysis.convergence_tol", format_double(c.analysis.convergence_tol));
  emit("output.trace", c.output.trace_path);
  emit("output.summary", c.output.summary_path);
  emit("output.plotdata", c.output.plotdata_path);
  emit("output.timing", c.output.timing ? "true" : "false");
  return out;
}

}  // namespace pdpiag
