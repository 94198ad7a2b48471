#include "softmodes/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "softmodes/io.hpp"

namespace softmodes {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long parse_int(const std::string& value, const std::string& field, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("integer expected, got '" + value + "'", field, line);
  }
}

std::uint64_t parse_u64(const std::string& value, const std::string& field, int line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("unsigned integer expected, got '" + value + "'", field, line);
  }
}

double parse_double(const std::string& value, const std::string& field, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("number expected, got '" + value + "'", field, line);
  }
}

bool parse_bool(const std::string& value, const std::string& field, int line) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("boolean expected, got '" + value + "'", field, line);
}

std::vector<int> parse_int_list(const std::string& value, const std::string& field, int line) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_int(item, field, line)));
  }
  if (out.empty()) throw ConfigError("nonempty integer list expected", field, line);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int line)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"lattice.L", [](ExperimentConfig& c, const std::string& v, int l) { c.L = static_cast<int>(parse_int(v, "lattice.L", l)); }},
      {"lattice.d", [](ExperimentConfig& c, const std::string& v, int l) { c.d = static_cast<int>(parse_int(v, "lattice.d", l)); }},
      {"patch.K", [](ExperimentConfig& c, const std::string& v, int l) { c.K = static_cast<int>(parse_int(v, "patch.K", l)); }},
      {"patch.dict_seed", [](ExperimentConfig& c, const std::string& v, int l) { c.dict_seed = parse_u64(v, "patch.dict_seed", l); }},
      {"patch.dict_variant", [](ExperimentConfig& c, const std::string& v, int) { c.dict_variant = v; }},
      {"patch.dict_file", [](ExperimentConfig& c, const std::string& v, int) { c.dict_file = v; }},
      {"patch.random_prior_total", [](ExperimentConfig& c, const std::string& v, int l) { c.random_prior_total = parse_double(v, "patch.random_prior_total", l); }},
      {"patch.backend", [](ExperimentConfig& c, const std::string& v, int) { c.backend = v; }},
      {"schedule.beta", [](ExperimentConfig& c, const std::string& v, int l) { c.beta = parse_double(v, "schedule.beta", l); }},
      {"schedule.t_max", [](ExperimentConfig& c, const std::string& v, int l) { c.t_max = parse_double(v, "schedule.t_max", l); }},
      {"schedule.t_min", [](ExperimentConfig& c, const std::string& v, int l) { c.t_min = parse_double(v, "schedule.t_min", l); }},
      {"schedule.steps", [](ExperimentConfig& c, const std::string& v, int l) { c.steps = static_cast<int>(parse_int(v, "schedule.steps", l)); }},
      {"ensemble.n_traj", [](ExperimentConfig& c, const std::string& v, int l) { c.n_traj = static_cast<int>(parse_int(v, "ensemble.n_traj", l)); }},
      {"ensemble.base_seed", [](ExperimentConfig& c, const std::string& v, int l) { c.base_seed = parse_u64(v, "ensemble.base_seed", l); }},
      {"ensemble.record_every", [](ExperimentConfig& c, const std::string& v, int l) { c.record_every = static_cast<int>(parse_int(v, "ensemble.record_every", l)); }},
      {"ensemble.noise", [](ExperimentConfig& c, const std::string& v, int l) { c.noise = parse_bool(v, "ensemble.noise", l); }},
      {"spectral.n_max", [](ExperimentConfig& c, const std::string& v, int l) { c.n_max = static_cast<int>(parse_int(v, "spectral.n_max", l)); }},
      {"spectral.use_diagonal", [](ExperimentConfig& c, const std::string& v, int l) { c.use_diagonal = parse_bool(v, "spectral.use_diagonal", l); }},
      {"spectral.fit_shells", [](ExperimentConfig& c, const std::string& v, int l) { c.fit_shells = parse_int_list(v, "spectral.fit_shells", l); }},
      {"spectral.probe_drift", [](ExperimentConfig& c, const std::string& v, int) { c.probe_drift = v; }},
      {"spectral.epsilon_floor", [](ExperimentConfig& c, const std::string& v, int l) { c.epsilon_floor = parse_double(v, "spectral.epsilon_floor", l); }},
      {"observables.smoothing_width", [](ExperimentConfig& c, const std::string& v, int l) { c.smoothing_width = parse_double(v, "observables.smoothing_width", l); }},
      {"theory.convention", [](ExperimentConfig& c, const std::string& v, int) { c.convention = v; }},
      {"theory.delta_x_var", [](ExperimentConfig& c, const std::string& v, int l) { c.delta_x_var = parse_double(v, "theory.delta_x_var", l); }},
      {"pulse.w_pulse", [](ExperimentConfig& c, const std::string& v, int l) { c.w_pulse = parse_double(v, "pulse.w_pulse", l); }},
      {"pulse.half_width", [](ExperimentConfig& c, const std::string& v, int l) { c.pulse_half_width = parse_double(v, "pulse.half_width", l); }},
      {"pulse.trials", [](ExperimentConfig& c, const std::string& v, int l) { c.pulse_trials = static_cast<int>(parse_int(v, "pulse.trials", l)); }},
      {"pulse.target", [](ExperimentConfig& c, const std::string& v, int) { c.pulse_target = v; }},
      {"pulse.window", [](ExperimentConfig& c, const std::string& v, int) { c.pulse_window = v; }},
      {"pulse.random_centers", [](ExperimentConfig& c, const std::string& v, int) { c.pulse_centers = v; }},
      {"pulse.t_center", [](ExperimentConfig& c, const std::string& v, int) { c.pulse_t_center = v; }},
      {"output.dir", [](ExperimentConfig& c, const std::string& v, int) { c.out_dir = v; }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", "", line_no);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", "", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key outside any [section]", key, line_no);
    const std::string dotted = section + "." + key;
    const auto it = setters().find(dotted);
    if (it == setters().end()) throw ConfigError("unknown key", dotted, line_no);
    it->second(cfg, value, line_no);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
  const auto it = setters().find(dotted_key);
  if (it == setters().end()) throw ConfigError("unknown key", dotted_key);
  it->second(cfg, value, 0);
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what, const std::string& field) {
    throw ConfigError(what, field);
  };
  if (cfg.d != 1 && cfg.d != 2) fail("dimension must be 1 or 2", "lattice.d");
  if (cfg.L < 2) fail("lattice side must be at least 2", "lattice.L");
  if (cfg.K < 0) fail("patch radius must be nonnegative", "patch.K");
  if (2 * cfg.K + 1 > cfg.L) fail("lattice must satisfy L >= 2K+1", "patch.K");
  if (cfg.dict_variant != "ten" && cfg.dict_variant != "eighteen")
    fail("variant must be ten or eighteen", "patch.dict_variant");
  if (!(cfg.random_prior_total > 0.0) || !(cfg.random_prior_total < 1.0))
    fail("random prior total must lie in (0, 1)", "patch.random_prior_total");
  if (cfg.backend != "direct" && cfg.backend != "fft")
    fail("backend must be direct or fft", "patch.backend");
  if (!(cfg.beta > 0.0)) fail("noise rate must be positive", "schedule.beta");
  if (!(cfg.t_max > cfg.t_min) || !(cfg.t_min > 0.0))
    fail("need t_max > t_min > 0", "schedule.t_min");
  if (cfg.steps < 2) fail("need at least 2 integration steps", "schedule.steps");
  if (cfg.n_traj < 1) fail("need at least one trajectory", "ensemble.n_traj");
  if (cfg.record_every < 1) fail("recording stride must be at least 1", "ensemble.record_every");
  if (cfg.n_max < 0) fail("shell count must be nonnegative", "spectral.n_max");
  if (2 * cfg.n_max > cfg.L) fail("n_max must not exceed L/2", "spectral.n_max");
  if (cfg.fit_shells.empty()) fail("at least one fit shell required", "spectral.fit_shells");
  for (int n : cfg.fit_shells)
    if (n < 1 || n > cfg.n_max) fail("fit shells must lie in [1, n_max]", "spectral.fit_shells");
  if (cfg.probe_drift != "reverse" && cfg.probe_drift != "dispersion")
    fail("probe drift must be reverse or dispersion", "spectral.probe_drift");
  if (!(cfg.epsilon_floor > 0.0)) fail("probe step floor must be positive", "spectral.epsilon_floor");
  if (cfg.smoothing_width < 0.0) fail("smoothing width must be nonnegative", "observables.smoothing_width");
  if (cfg.convention != "main-text" && cfg.convention != "tree-level" &&
      cfg.convention != "reverse-flow")
    fail("convention must be main-text, tree-level or reverse-flow", "theory.convention");
  if (cfg.delta_x_var < 0.0) fail("variance must be nonnegative", "theory.delta_x_var");
  if (!(cfg.pulse_half_width > 0.0)) fail("pulse half-width must be positive", "pulse.half_width");
  if (cfg.pulse_trials < 1) fail("need at least one pulse trial", "pulse.trials");
  if (cfg.pulse_window != "log_t" && cfg.pulse_window != "sigma")
    fail("window must be log_t or sigma", "pulse.window");
  if (cfg.pulse_centers != "uniform_t" && cfg.pulse_centers != "uniform_log_t")
    fail("random centers must be uniform_t or uniform_log_t", "pulse.random_centers");
  if (cfg.pulse_t_center != "auto") {
    try {
      if (!(std::stod(cfg.pulse_t_center) > 0.0)) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail("t_center must be 'auto' or a positive number", "pulse.t_center");
    }
  }
  if (cfg.pulse_target != "uniform+" && cfg.pulse_target != "uniform-") {
    try {
      (void)std::stol(cfg.pulse_target);
    } catch (const std::exception&) {
      fail("target must be uniform+, uniform- or a pattern index", "pulse.target");
    }
  }
  if (cfg.out_dir.empty()) fail("output directory required", "output.dir");
}

std::string echo_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[lattice]\n";
  out << "L = " << c.L << '\n';
  out << "d = " << c.d << '\n';
  out << "\n[patch]\n";
  out << "K = " << c.K << '\n';
  out << "dict_seed = " << c.dict_seed << '\n';
  out << "dict_variant = " << c.dict_variant << '\n';
  out << "dict_file = " << c.dict_file << '\n';
  out << "random_prior_total = " << format_g17(c.random_prior_total) << '\n';
  out << "backend = " << c.backend << '\n';
  out << "\n[schedule]\n";
  out << "beta = " << format_g17(c.beta) << '\n';
  out << "t_max = " << format_g17(c.t_max) << '\n';
  out << "t_min = " << format_g17(c.t_min) << '\n';
  out << "steps = " << c.steps << '\n';
  out << "\n[ensemble]\n";
  out << "n_traj = " << c.n_traj << '\n';
  out << "base_seed = " << c.base_seed << '\n';
  out << "record_every = " << c.record_every << '\n';
  out << "noise = " << (c.noise ? "true" : "false") << '\n';
  out << "\n[spectral]\n";
  out << "n_max = " << c.n_max << '\n';
  out << "use_diagonal = " << (c.use_diagonal ? "true" : "false") << '\n';
  out << "fit_shells = ";
  for (std::size_t i = 0; i < c.fit_shells.size(); ++i)
    out << (i ? "," : "") << c.fit_shells[i];
  out << '\n';
  out << "probe_drift = " << c.probe_drift << '\n';
  out << "epsilon_floor = " << format_g17(c.epsilon_floor) << '\n';
  out << "\n[observables]\n";
  out << "smoothing_width = " << format_g17(c.smoothing_width) << '\n';
  out << "\n[theory]\n";
  out << "convention = " << c.convention << '\n';
  out << "delta_x_var = " << format_g17(c.delta_x_var) << '\n';
  out << "\n[pulse]\n";
  out << "w_pulse = " << format_g17(c.w_pulse) << '\n';
  out << "half_width = " << format_g17(c.pulse_half_width) << '\n';
  out << "trials = " << c.pulse_trials << '\n';
  out << "target = " << c.pulse_target << '\n';
  out << "window = " << c.pulse_window << '\n';
  out << "random_centers = " << c.pulse_centers << '\n';
  out << "t_center = " << c.pulse_t_center << '\n';
  out << "\n[output]\n";
  out << "dir = " << c.out_dir << '\n';
  return out.str();
}

}  // namespace softmodes
