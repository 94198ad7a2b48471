#include "softmodes/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "softmodes/io.hpp"
#include "softmodes/version.hpp"

namespace softmodes {

namespace {

using nlohmann::json;

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double median_finite(const std::vector<double>& v) {
  std::vector<double> finite;
  for (double x : v)
    if (std::isfinite(x)) finite.push_back(x);
  return median_of(std::move(finite));
}

std::vector<std::string> config_comment_lines(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back(std::string(kVersion));
  std::istringstream echo(echo_config(cfg));
  std::string line;
  while (std::getline(echo, line))
    if (!line.empty()) lines.push_back("cfg " + line);
  return lines;
}

std::string config_one_liner(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << kVersion << " |";
  std::istringstream echo(echo_config(cfg));
  std::string line;
  while (std::getline(echo, line))
    if (!line.empty()) out << ' ' << line << ';';
  return out.str();
}

// Removes everything this run created if it fails partway.
class OutputTracker {
 public:
  explicit OutputTracker(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  std::filesystem::path track(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  void commit() noexcept { committed_ = true; }
  ~OutputTracker() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

}  // namespace

VPSchedule make_schedule(const ExperimentConfig& cfg) { return VPSchedule(cfg.beta); }

LogTimeGrid make_grid(const ExperimentConfig& cfg) {
  return LogTimeGrid(cfg.t_max, cfg.t_min, cfg.steps);
}

LatticeGrid make_lattice(const ExperimentConfig& cfg) { return LatticeGrid(cfg.L, cfg.d); }

PatchDictionary make_dictionary(const ExperimentConfig& cfg) {
  if (!cfg.dict_file.empty()) {
    std::ifstream in(cfg.dict_file, std::ios::binary);
    if (!in) throw ConfigError("cannot open dictionary file '" + cfg.dict_file + "'", "patch.dict_file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return dictionary_from_text(buf.str());
  }
  const DictionaryVariant variant =
      cfg.dict_variant == "ten" ? DictionaryVariant::ten : DictionaryVariant::eighteen;
  return make_patch_dictionary(cfg.K, cfg.d, cfg.dict_seed, variant, cfg.random_prior_total);
}

MassConvention parse_convention(const std::string& name) {
  if (name == "main-text") return MassConvention::main_text;
  if (name == "tree-level") return MassConvention::tree_level;
  if (name == "reverse-flow") return MassConvention::reverse_flow;
  throw ParameterError("unknown mass convention '" + name + "'");
}

int resolve_pulse_target(const PatchDictionary& dict, const std::string& spec) {
  auto find_uniform = [&](double value) {
    for (int k = 0; k < dict.size(); ++k) {
      const auto& p = dict.pattern(k);
      if (std::all_of(p.begin(), p.end(), [&](double e) { return e == value; })) return k;
    }
    throw ParameterError("dictionary has no uniform pattern of the requested sign");
  };
  if (spec == "uniform+") return find_uniform(1.0);
  if (spec == "uniform-") return find_uniform(-1.0);
  const int id = static_cast<int>(std::stol(spec));
  if (id < 0 || id >= dict.size()) throw ParameterError("target pattern index out of range");
  return id;
}

std::vector<ProbeDirection> probe_directions(const ExperimentConfig& cfg) {
  std::vector<ProbeDirection> dirs;
  dirs.push_back(ProbeDirection::axis0);
  if (cfg.d == 2) dirs.push_back(ProbeDirection::axis1);
  if (cfg.use_diagonal && cfg.d == 2) dirs.push_back(ProbeDirection::diagonal);
  return dirs;
}

SimulationResult run_simulation(const ExperimentConfig& cfg, const ScoreModel& model,
                                int n_workers) {
  const VPSchedule sched = make_schedule(cfg);
  const LogTimeGrid grid = make_grid(cfg);
  const LatticeGrid lattice = make_lattice(cfg);

  IntegratorConfig icfg{grid, cfg.noise, cfg.base_seed, cfg.record_every, 1.0};

  SimulationResult result;
  result.records = run_ensemble(model, sched, icfg, lattice, cfg.n_traj, n_workers);

  const DriftFn drift = cfg.probe_drift == "dispersion" ? make_dispersion_drift(model, sched)
                                                        : make_reverse_drift(model, sched);
  const auto dirs = probe_directions(cfg);

  for (const TrajectoryRecord& rec : result.records) {
    DispersionSpectrum spec = shell_spectrum(drift, rec.times, rec.snapshots, sched, cfg.n_max,
                                             dirs, cfg.epsilon_floor);
    fill_xi_eq(spec, cfg.fit_shells);
    result.spectra.push_back(std::move(spec));

    ObservableSeries xi;
    xi.times = rec.times;
    xi.label = "xi_x";
    for (const LatticeField& snap : rec.snapshots)
      xi.values.push_back(correlation_length_first_moment(snap));
    ObservableSeries smooth = gaussian_smooth(xi, cfg.smoothing_width);
    smooth.label = "xi_x_smoothed";
    ObservableSeries deriv = log_derivative(smooth);
    deriv.label = "dxi_dlogt";
    result.xi_raw.push_back(std::move(xi));
    result.xi_smooth.push_back(std::move(smooth));
    result.dxi_dlogt.push_back(std::move(deriv));
  }

  result.t_c_hat = estimate_critical_scale(result.spectra);
  return result;
}

namespace {

std::vector<std::string> trajectory_columns(int n_max) {
  std::vector<std::string> cols = {"t", "xi_x", "xi_x_smoothed", "dxi_dlogt"};
  for (int n = 0; n <= n_max; ++n) cols.push_back("lambda_" + std::to_string(n));
  cols.push_back("xi_eq");
  return cols;
}

std::vector<std::vector<double>> trajectory_rows(const SimulationResult& result, std::size_t j,
                                                 int n_max) {
  const auto& times = result.records[j].times;
  std::vector<std::vector<double>> rows;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<double> row = {times[ti], result.xi_raw[j].values[ti],
                               result.xi_smooth[j].values[ti], result.dxi_dlogt[j].values[ti]};
    for (int n = 0; n <= n_max; ++n)
      row.push_back(result.spectra[j].lambda[static_cast<std::size_t>(n)][ti]);
    row.push_back(result.spectra[j].xi_eq[ti]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg, int n_workers) {
  const VPSchedule sched = make_schedule(cfg);
  const PatchDictionary dict = make_dictionary(cfg);
  const PatchPosteriorScore model(dict, sched,
                                  cfg.backend == "fft" ? CorrelationBackend::fft
                                                       : CorrelationBackend::direct);

  OutputTracker out(cfg.out_dir);
  write_text_file(out.track("config.echo"), echo_config(cfg));
  write_text_file(out.track("dictionary.txt"), dictionary_to_text(dict));

  const SimulationResult result = run_simulation(cfg, model, n_workers);
  const auto comments = config_comment_lines(cfg);
  const auto columns = trajectory_columns(cfg.n_max);

  for (std::size_t j = 0; j < result.records.size(); ++j) {
    write_csv(out.track("trajectory_" + std::to_string(j) + ".csv"), comments, columns,
              trajectory_rows(result, j, cfg.n_max));
  }

  // Across-trajectory median of every column.
  const std::size_t n_times = result.records.front().times.size();
  std::vector<std::vector<double>> median_rows;
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    std::vector<double> row = {result.records.front().times[ti]};
    auto med = [&](auto&& get) {
      std::vector<double> sample;
      for (std::size_t j = 0; j < result.records.size(); ++j) sample.push_back(get(j));
      return median_finite(sample);
    };
    row.push_back(med([&](std::size_t j) { return result.xi_raw[j].values[ti]; }));
    row.push_back(med([&](std::size_t j) { return result.xi_smooth[j].values[ti]; }));
    row.push_back(med([&](std::size_t j) { return result.dxi_dlogt[j].values[ti]; }));
    for (int n = 0; n <= cfg.n_max; ++n)
      row.push_back(med([&](std::size_t j) {
        return result.spectra[j].lambda[static_cast<std::size_t>(n)][ti];
      }));
    row.push_back(med([&](std::size_t j) { return result.spectra[j].xi_eq[ti]; }));
    median_rows.push_back(std::move(row));
  }
  write_csv(out.track("median.csv"), comments, columns, median_rows);

  // Five log-spaced snapshots per trajectory.
  const std::string pgm_comment = config_one_liner(cfg);
  for (std::size_t j = 0; j < result.records.size(); ++j) {
    const auto& rec = result.records[j];
    const std::size_t last = rec.snapshots.size() - 1;
    for (int q = 0; q < 5; ++q) {
      const std::size_t ti = (last * static_cast<std::size_t>(q)) / 4;
      write_pgm(out.track("snapshot_traj" + std::to_string(j) + "_" + std::to_string(q) + ".pgm"),
                rec.snapshots[ti], false,
                pgm_comment + " t=" + format_g17(rec.times[ti]));
    }
  }

  json summary;
  summary["version"] = kVersion;
  summary["t_c_theory"] = {
      {"main-text", critical_time(cfg.K, cfg.d, sched, MassConvention::main_text)},
      {"tree-level", critical_time(cfg.K, cfg.d, sched, MassConvention::tree_level)},
      {"reverse-flow", critical_time(cfg.K, cfg.d, sched, MassConvention::reverse_flow)},
  };
  summary["t_c_hat"] = result.t_c_hat;
  std::vector<double> final_xi;
  for (const auto& rec : result.records)
    final_xi.push_back(correlation_length_first_moment(rec.state_at_t_min()));
  summary["xi_x_final_median"] = median_of(final_xi);
  summary["config_echo"] = echo_config(cfg);
  write_text_file(out.track("summary.json"), summary.dump(2) + "\n");

  out.commit();
}

void cmd_theory(const ExperimentConfig& cfg) {
  const VPSchedule sched = make_schedule(cfg);
  const LogTimeGrid grid = make_grid(cfg);
  const MassConvention convention = parse_convention(cfg.convention);

  auto comments = config_comment_lines(cfg);
  comments.push_back("convention = " + to_string(convention));
  std::vector<double> critical_times;
  for (MassConvention c :
       {MassConvention::main_text, MassConvention::tree_level, MassConvention::reverse_flow}) {
    critical_times.push_back(critical_time(cfg.K, cfg.d, sched, c));
    comments.push_back("t_c[" + to_string(c) + "] = " + format_g17(critical_times.back()));
  }

  // Grid times plus exact rows at each convention's critical time.
  std::vector<double> times = grid.times();
  for (double t_c : critical_times)
    if (t_c < grid.t_max() && t_c > grid.t_min()) times.push_back(t_c);
  std::sort(times.begin(), times.end(), std::greater<>());

  std::vector<std::vector<double>> rows;
  for (double t : times) {
    const GLCoefficients co = gl_coefficients(cfg.K, cfg.d, sched, t, convention);
    rows.push_back({t, co.r, co.kappa, co.u, effective_mass(co, cfg.delta_x_var)});
  }

  OutputTracker out(cfg.out_dir);
  write_text_file(out.track("config.echo"), echo_config(cfg));
  write_csv(out.track("theory.csv"), comments, {"t", "r", "kappa", "u", "r_eff"}, rows);
  out.commit();
}

double cmd_oracle(const ExperimentConfig& cfg) {
  const VPSchedule sched = make_schedule(cfg);
  const LatticeGrid grid = make_lattice(cfg);
  const double k_unit = 2.0 * std::numbers::pi / grid.side();

  double worst = 0.0;
  std::ostringstream report;
  report << kVersion << "\ndense Jacobian vs analytic dispersion, L=" << cfg.L << " d=" << cfg.d
         << " K=" << cfg.K << "\n";
  for (double t : {0.5, 1.0, 3.0, 5.0}) {
    std::vector<double> dense = dense_jacobian_oracle(cfg.K, cfg.d, sched, grid, t);
    std::vector<double> analytic;
    if (cfg.d == 1) {
      for (int m = 0; m < grid.side(); ++m)
        analytic.push_back(analytic_dispersion(cfg.K, cfg.d, sched, {k_unit * m, 0.0}, t));
    } else {
      for (int mi = 0; mi < grid.side(); ++mi)
        for (int mj = 0; mj < grid.side(); ++mj)
          analytic.push_back(
              analytic_dispersion(cfg.K, cfg.d, sched, {k_unit * mi, k_unit * mj}, t));
    }
    std::sort(analytic.begin(), analytic.end());
    double dev = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i)
      dev = std::max(dev, std::abs(dense[i] - analytic[i]));
    worst = std::max(worst, dev);
    report << "t = " << format_g17(t) << "  max |dense - analytic| = " << format_g17(dev) << "\n";
  }
  report << "worst deviation = " << format_g17(worst) << "\n";

  OutputTracker out(cfg.out_dir);
  write_text_file(out.track("config.echo"), echo_config(cfg));
  write_text_file(out.track("oracle_report.txt"), report.str());
  out.commit();
  return worst;
}

void cmd_probe(const ExperimentConfig& cfg) {
  const VPSchedule sched = make_schedule(cfg);
  const LogTimeGrid grid = make_grid(cfg);
  const LatticeGrid lattice = make_lattice(cfg);
  const PatchDictionary dict = make_dictionary(cfg);
  const PatchPosteriorScore model(dict, sched,
                                  cfg.backend == "fft" ? CorrelationBackend::fft
                                                       : CorrelationBackend::direct);

  // Fixed-state entry point: the spectrum at the symmetric state x = 0, where
  // the dispersion drift linearization matches the analytic formulas.
  const DriftFn drift = make_dispersion_drift(model, sched);
  std::vector<double> times;
  for (std::size_t k = 0; k < grid.times().size(); k += static_cast<std::size_t>(cfg.record_every))
    times.push_back(grid.times()[k]);
  const std::vector<LatticeField> states(times.size(), LatticeField(lattice));

  DispersionSpectrum spec =
      shell_spectrum(drift, times, states, sched, cfg.n_max, probe_directions(cfg),
                     cfg.epsilon_floor);
  fill_xi_eq(spec, cfg.fit_shells);

  std::vector<std::string> columns = {"t"};
  for (int n = 0; n <= cfg.n_max; ++n) columns.push_back("lambda_" + std::to_string(n));
  columns.push_back("xi_eq");
  std::vector<std::vector<double>> rows;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<double> row = {times[ti]};
    for (int n = 0; n <= cfg.n_max; ++n)
      row.push_back(spec.lambda[static_cast<std::size_t>(n)][ti]);
    row.push_back(spec.xi_eq[ti]);
    rows.push_back(std::move(row));
  }

  OutputTracker out(cfg.out_dir);
  write_text_file(out.track("config.echo"), echo_config(cfg));
  write_csv(out.track("probe.csv"), config_comment_lines(cfg), columns, rows);
  out.commit();
}

PulseOutcome cmd_pulse(const ExperimentConfig& cfg, int n_workers) {
  const VPSchedule sched = make_schedule(cfg);
  const LogTimeGrid grid = make_grid(cfg);
  const LatticeGrid lattice = make_lattice(cfg);
  const PatchDictionary dict = make_dictionary(cfg);

  PulseConfig pcfg;
  pcfg.w_pulse = cfg.w_pulse;
  pcfg.half_width = cfg.pulse_half_width;
  pcfg.trials = cfg.pulse_trials;
  pcfg.base_seed = cfg.base_seed;
  pcfg.target_id = resolve_pulse_target(dict, cfg.pulse_target);
  pcfg.window = cfg.pulse_window == "sigma" ? PulseWindowKind::sigma : PulseWindowKind::log_t;
  pcfg.centers = cfg.pulse_centers == "uniform_log_t" ? PulseCenterDistribution::uniform_log_t
                                                      : PulseCenterDistribution::uniform_t;
  pcfg.backend = cfg.backend == "fft" ? CorrelationBackend::fft : CorrelationBackend::direct;
  pcfg.t_center_critical = cfg.pulse_t_center == "auto"
                               ? critical_time(cfg.K, cfg.d, sched, MassConvention::tree_level)
                               : std::stod(cfg.pulse_t_center);

  const PulseOutcome outcome = run_pulse_experiment(dict, sched, grid, lattice, pcfg, n_workers);

  OutputTracker out(cfg.out_dir);
  write_text_file(out.track("config.echo"), echo_config(cfg));
  write_text_file(out.track("dictionary.txt"), dictionary_to_text(dict));

  std::vector<std::vector<double>> rows;
  for (const PulseTrial& trial : outcome.trials) {
    rows.push_back({static_cast<double>(trial.index),
                    trial.condition == PulseCondition::critical ? 0.0 : 1.0, trial.t_center,
                    trial.alignment});
  }
  auto comments = config_comment_lines(cfg);
  comments.push_back("condition: 0 = critical, 1 = random");
  write_csv(out.track("pulse_trials.csv"), comments, {"trial", "condition", "t_center", "alignment"},
            rows);

  json summary;
  summary["version"] = kVersion;
  summary["median_critical"] = outcome.median_critical;
  summary["median_random"] = outcome.median_random;
  if (outcome.p_defined)
    summary["p_value"] = outcome.p_value;
  else
    summary["p_value"] = "undefined-test: " + outcome.p_message;
  summary["t_center_critical"] = pcfg.t_center_critical;
  summary["config_echo"] = echo_config(cfg);
  write_text_file(out.track("pulse_summary.json"), summary.dump(2) + "\n");
  out.commit();
  return outcome;
}

}  // namespace softmodes
