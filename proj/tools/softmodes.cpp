#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "softmodes/config.hpp"
#include "softmodes/errors.hpp"
#include "softmodes/runner.hpp"
#include "softmodes/version.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numeric divergence, 4 oracle failure.
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitOracle = 4;

int worker_count() {
  const char* env = std::getenv("SOFTMODES_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

struct Overrides {
  std::vector<std::pair<std::string, std::string>> entries;
  void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
            const std::string& help) {
    auto holder = std::make_shared<std::string>();
    cmd->add_option_function<std::string>(
           flag,
           [this, key, holder](const std::string& v) { entries.emplace_back(key, v); }, help)
        ->expected(1);
  }
};

softmodes::ExperimentConfig build_config(const std::string& config_path, const Overrides& ov) {
  softmodes::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = softmodes::load_config(config_path);
  for (const auto& [key, value] : ov.entries) softmodes::apply_override(cfg, key, value);
  softmodes::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(softmodes::kVersion) +
               " - reverse-diffusion pattern formation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "configuration file (key = value with [section] headers)");

  Overrides ov;
  auto add_common = [&](CLI::App* cmd) {
    ov.bind(cmd, "--out", "output.dir", "output directory");
    ov.bind(cmd, "--L", "lattice.L", "lattice side length");
    ov.bind(cmd, "--d", "lattice.d", "lattice dimension (1 or 2)");
    ov.bind(cmd, "--K", "patch.K", "patch radius");
    ov.bind(cmd, "--dict-seed", "patch.dict_seed", "dictionary generator seed");
    ov.bind(cmd, "--dict-variant", "patch.dict_variant", "ten | eighteen");
    ov.bind(cmd, "--dict-file", "patch.dict_file", "load dictionary from file");
    ov.bind(cmd, "--backend", "patch.backend", "correlation backend: direct | fft");
    ov.bind(cmd, "--beta", "schedule.beta", "noise rate");
    ov.bind(cmd, "--t-max", "schedule.t_max", "initial reverse time");
    ov.bind(cmd, "--t-min", "schedule.t_min", "final reverse time");
    ov.bind(cmd, "--steps", "schedule.steps", "integration steps");
    ov.bind(cmd, "--n-traj", "ensemble.n_traj", "trajectories in the ensemble");
    ov.bind(cmd, "--seed", "ensemble.base_seed", "base seed (trajectory j uses base_seed + j)");
    ov.bind(cmd, "--record-every", "ensemble.record_every", "snapshot/probe stride");
    ov.bind(cmd, "--noise", "ensemble.noise", "true | false");
    ov.bind(cmd, "--n-max", "spectral.n_max", "highest Fourier shell");
    ov.bind(cmd, "--probe-drift", "spectral.probe_drift", "reverse | dispersion");
    ov.bind(cmd, "--smoothing-width", "observables.smoothing_width",
            "Gaussian smoothing width (grid indices)");
    ov.bind(cmd, "--convention", "theory.convention", "main-text | tree-level | reverse-flow");
    ov.bind(cmd, "--w-pulse", "pulse.w_pulse", "guidance pulse strength");
    ov.bind(cmd, "--half-width", "pulse.half_width", "pulse half-width (log-time units)");
    ov.bind(cmd, "--trials", "pulse.trials", "paired pulse trials");
    ov.bind(cmd, "--target", "pulse.target", "uniform+ | uniform- | pattern index");
    ov.bind(cmd, "--window", "pulse.window", "log_t | sigma");
    ov.bind(cmd, "--random-centers", "pulse.random_centers", "uniform_t | uniform_log_t");
    ov.bind(cmd, "--t-center", "pulse.t_center", "auto | pulse center time");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "reverse ensemble with correlation lengths, shell spectra and snapshots");
  CLI::App* theory = app.add_subcommand("theory", "closed-form coefficient table and critical times");
  CLI::App* oracle =
      app.add_subcommand("oracle", "dense Jacobian vs analytic dispersion cross-check");
  CLI::App* probe = app.add_subcommand("probe", "shell spectrum at the symmetric state over the grid");
  CLI::App* pulse = app.add_subcommand("pulse", "paired critical-vs-random guidance pulse experiment");
  for (CLI::App* cmd : {simulate, theory, oracle, probe, pulse}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    softmodes::ExperimentConfig cfg;
    try {
      cfg = build_config(config_path, ov);
      if (oracle->parsed()) {
        // The dense cross-check needs a small lattice; default to L=8, K=1
        // unless the user chose a size explicitly.
        bool user_set_L = false, user_set_K = false;
        for (const auto& [key, value] : ov.entries) {
          if (key == "lattice.L") user_set_L = true;
          if (key == "patch.K") user_set_K = true;
        }
        if (!user_set_L && config_path.empty()) cfg.L = 8;
        if (!user_set_K && config_path.empty()) cfg.K = 1;
        cfg.n_max = std::min(cfg.n_max, cfg.L / 2);
        std::erase_if(cfg.fit_shells, [&](int n) { return n > cfg.n_max; });
        if (cfg.fit_shells.empty()) cfg.fit_shells = {1};
        softmodes::validate(cfg);
      }
    } catch (const softmodes::ConfigError& err) {
      std::cerr << "config error: " << err.what() << "\n";
      return kExitConfig;
    }

    const int workers = worker_count();
    if (simulate->parsed()) {
      softmodes::cmd_simulate(cfg, workers);
      std::cout << "simulation artifacts written to " << cfg.out_dir << "\n";
    } else if (theory->parsed()) {
      softmodes::cmd_theory(cfg);
      const auto sched = softmodes::make_schedule(cfg);
      for (auto c : {softmodes::MassConvention::main_text, softmodes::MassConvention::tree_level,
                     softmodes::MassConvention::reverse_flow}) {
        std::cout << "t_c[" << softmodes::to_string(c)
                  << "] = " << softmodes::critical_time(cfg.K, cfg.d, sched, c) << "\n";
      }
      std::cout << "theory table written to " << cfg.out_dir << "\n";
    } else if (oracle->parsed()) {
      const double dev = softmodes::cmd_oracle(cfg);
      std::cout << "max |dense - analytic| = " << dev << "\n";
      if (!(dev <= 1e-10)) {
        std::cerr << "oracle failure: deviation " << dev << " exceeds 1e-10\n";
        return kExitOracle;
      }
    } else if (probe->parsed()) {
      softmodes::cmd_probe(cfg);
      std::cout << "probe table written to " << cfg.out_dir << "\n";
    } else if (pulse->parsed()) {
      const auto outcome = softmodes::cmd_pulse(cfg, workers);
      std::cout << "median alignment: critical = " << outcome.median_critical
                << ", random = " << outcome.median_random << "\n";
      if (outcome.p_defined)
        std::cout << "one-sided sign test p = " << outcome.p_value << "\n";
      else
        std::cout << "sign test: " << outcome.p_message << "\n";
      std::cout << "pulse artifacts written to " << cfg.out_dir << "\n";
    }
    return 0;
  } catch (const softmodes::DivergenceError& err) {
    std::cerr << "divergence: " << err.what() << "\n";
    return kExitDivergence;
  } catch (const softmodes::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
