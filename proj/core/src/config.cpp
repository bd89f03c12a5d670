#include "cdrl/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cdrl/errors.hpp"

namespace cdrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) fail(line, "malformed number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "malformed number '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) fail(line, "malformed integer '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "malformed integer '" + v + "'");
  }
}

std::uint64_t parse_seed(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) fail(line, "malformed seed '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "malformed seed '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(line, "expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, "empty entry in list '" + v + "'");
    out.push_back(static_cast<int>(parse_int(item, line)));
  }
  if (out.empty()) fail(line, "empty list");
  return out;
}

// Shortest round-trip decimal form, so emitted configs are byte-stable and
// re-parse to the identical double.
std::string real_repr(double x) { return nlohmann::json(x).dump(); }

std::string int_list_repr(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ExperimentSpec parse_run_config(const std::string& text) {
  ExperimentSpec spec;
  std::map<std::string, int> seen;  // key -> first line

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key");
    if (value.empty()) fail(line_no, "missing value for '" + key + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      fail(line_no, "duplicate key '" + key + "' (first on line " +
                        std::to_string(it->second) + ")");
    }
    seen[key] = line_no;

    WorkerConfig& w = spec.config;
    if (key == "mode") {
      try {
        spec.mode = parse_mode(value);
      } catch (const ConfigError& e) {
        fail(line_no, e.what());
      }
    } else if (key == "env") {
      spec.env = value;
    } else if (key == "teacher_env") {
      spec.teacher_env = value;
    } else if (key == "teacher_checkpoint") {
      spec.teacher_checkpoint = value == "none" ? "" : value;
    } else if (key == "align_checkpoint") {
      spec.align_checkpoint = value == "none" ? "" : value;
    } else if (key == "workers") {
      spec.workers = static_cast<int>(parse_int(value, line_no));
    } else if (key == "t_max") {
      w.t_max = static_cast<int>(parse_int(value, line_no));
    } else if (key == "T_max") {
      w.T_max = parse_int(value, line_no);
    } else if (key == "T1") {
      w.T1 = parse_int(value, line_no);
    } else if (key == "T2") {
      w.T2 = parse_int(value, line_no);
    } else if (key == "distill_stop") {
      w.distill_stop = parse_int(value, line_no);
    } else if (key == "gamma") {
      w.gamma = parse_real(value, line_no);
    } else if (key == "lambda") {
      w.lambda = parse_real(value, line_no);
    } else if (key == "tau") {
      w.tau = parse_real(value, line_no);
    } else if (key == "entropy_coef") {
      w.entropy_coef = parse_real(value, line_no);
    } else if (key == "value_coef") {
      w.value_coef = parse_real(value, line_no);
    } else if (key == "distill_weight") {
      w.distill_weight = parse_real(value, line_no);
    } else if (key == "lr") {
      w.lr = parse_real(value, line_no);
    } else if (key == "align_lr") {
      w.align_lr = parse_real(value, line_no);
    } else if (key == "distill_lr") {
      w.distill_lr = parse_real(value, line_no);
    } else if (key == "seed") {
      w.seed = parse_seed(value, line_no);
    } else if (key == "freeze_align_after_t2") {
      w.freeze_align_after_t2 = parse_bool(value, line_no);
    } else if (key == "align_batch") {
      w.align_batch = static_cast<int>(parse_int(value, line_no));
    } else if (key == "align_steps_per_cycle") {
      w.align_steps_per_cycle = static_cast<int>(parse_int(value, line_no));
    } else if (key == "hidden") {
      w.hidden = parse_int_list(value, line_no);
    } else if (key == "align_hidden") {
      w.align_hidden = parse_int_list(value, line_no);
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  spec.validate();
  return spec;
}

ExperimentSpec load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string emit_resolved_config(const ExperimentSpec& spec) {
  const WorkerConfig& w = spec.config;
  std::ostringstream out;
  out << "mode = " << mode_name(spec.mode) << '\n';
  out << "env = " << spec.env << '\n';
  if (!spec.teacher_env.empty()) out << "teacher_env = " << spec.teacher_env << '\n';
  if (!spec.teacher_checkpoint.empty()) {
    out << "teacher_checkpoint = " << spec.teacher_checkpoint << '\n';
  }
  if (!spec.align_checkpoint.empty()) {
    out << "align_checkpoint = " << spec.align_checkpoint << '\n';
  }
  out << "workers = " << spec.workers << '\n';
  out << "seed = " << w.seed << '\n';
  out << "t_max = " << w.t_max << '\n';
  out << "T_max = " << w.T_max << '\n';
  out << "T1 = " << w.T1 << '\n';
  out << "T2 = " << w.T2 << '\n';
  out << "distill_stop = " << w.distill_stop << '\n';
  out << "gamma = " << real_repr(w.gamma) << '\n';
  out << "lambda = " << real_repr(w.lambda) << '\n';
  out << "tau = " << real_repr(w.tau) << '\n';
  out << "entropy_coef = " << real_repr(w.entropy_coef) << '\n';
  out << "value_coef = " << real_repr(w.value_coef) << '\n';
  out << "distill_weight = " << real_repr(w.distill_weight) << '\n';
  out << "lr = " << real_repr(w.lr) << '\n';
  out << "align_lr = " << real_repr(w.align_lr) << '\n';
  out << "distill_lr = " << real_repr(w.distill_lr) << '\n';
  out << "freeze_align_after_t2 = " << (w.freeze_align_after_t2 ? "true" : "false") << '\n';
  out << "align_batch = " << w.align_batch << '\n';
  out << "align_steps_per_cycle = " << w.align_steps_per_cycle << '\n';
  out << "hidden = " << int_list_repr(w.hidden) << '\n';
  out << "align_hidden = " << int_list_repr(w.align_hidden) << '\n';
  return out.str();
}

}  // namespace cdrl
