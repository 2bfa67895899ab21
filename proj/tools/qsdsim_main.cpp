// Command-line entry point: config resolution, subcommand dispatch, CSV and
// manifest emission.
//
// Exit codes: 0 success, 1 validation failure, 2 config error, 3 numerical
// failure.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qsdsim/config.hpp"
#include "qsdsim/csv.hpp"
#include "qsdsim/ensemble.hpp"
#include "qsdsim/errors.hpp"
#include "qsdsim/rsj.hpp"
#include "qsdsim/version.hpp"
#include "validate.hpp"

namespace fs = std::filesystem;
using namespace qsdsim;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string command_echo;
};

config::RunConfig resolve(const GlobalArgs& g, const std::string& forced_model) {
  std::vector<std::string> sets = g.sets;
  if (!forced_model.empty()) sets.insert(sets.begin(), "model=" + forced_model);
  return config::load(g.config_path, sets);
}

void ensure_out_dir(const config::RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

csv::Table trajectory_table(const qsd::TrajectoryRecord& rec) {
  csv::Table t;
  t.header = {"tau", "x1", "p1", "x2", "p2", "S", "norm_drift", "occupancy"};
  t.rows.reserve(rec.size());
  for (size_t k = 0; k < rec.size(); ++k)
    t.rows.push_back({rec.times[k], rec.exp_x1[k], rec.exp_p1[k], rec.exp_x2[k], rec.exp_p2[k],
                      rec.entropy[k], rec.norm_drift[k], rec.truncation_occupancy[k]});
  return t;
}

csv::Table sweep_table(const ensemble::SweepResult& sr) {
  csv::Table t;
  t.header = {"axis_value", "grand_mean_entropy", "stderr",         "n_traj",
              "converged",  "mean_S_entrained",   "mean_S_chaotic", "n_entrained",
              "n_chaotic",  "fock_dim",           "degraded",       "n_failed",
              "traj_then_time_mean"};
  const double nan = std::nan("");
  for (const auto& p : sr.points) {
    if (p.failed) {
      t.rows.push_back({p.axis_value, nan, nan, 0.0, 0.0, nan, nan, 0.0, 0.0, double(p.fock_dim),
                        1.0, 0.0, nan});
      continue;
    }
    const auto& s = p.stats;
    t.rows.push_back({p.axis_value, s.grand_mean_entropy, s.stderr_grand, double(s.n_used),
                      s.converged ? 1.0 : 0.0, s.n_entrained ? s.mean_S_entrained : nan,
                      s.n_chaotic ? s.mean_S_chaotic : nan, double(s.n_entrained),
                      double(s.n_chaotic), double(p.fock_dim), s.degraded ? 1.0 : 0.0,
                      double(s.n_failed), s.traj_then_time_mean});
  }
  return t;
}

void write_plot_stub(const std::string& path, const std::string& csv_name,
                     const std::string& x_label, bool log_x) {
  std::ofstream os(path, std::ios::binary);
  os << "#!/usr/bin/env python3\n"
     << "# Plot stub for " << csv_name << ".\n"
     << "# Columns:\n"
     << "#   axis_value          sweep axis (" << x_label << ")\n"
     << "#   grand_mean_entropy  time-and-trajectory mean entanglement entropy\n"
     << "#   stderr              standard error over per-trajectory time means\n"
     << "#   n_traj              trajectories used\n"
     << "#   converged           1 when the final 10% of trajectories moved the mean < target\n"
     << "#   mean_S_entrained/mean_S_chaotic  per-class means (nan when class empty)\n"
     << "#   n_entrained/n_chaotic            class sizes\n"
     << "#   fock_dim            per-point basis size\n"
     << "#   degraded/n_failed   truncation-health failures\n"
     << "import csv\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "xs, ys, es = [], [], []\n"
     << "with open('" << csv_name << "') as f:\n"
     << "    for row in csv.DictReader(f):\n"
     << "        xs.append(float(row['axis_value']))\n"
     << "        ys.append(float(row['grand_mean_entropy']))\n"
     << "        es.append(float(row['stderr']))\n"
     << "plt.errorbar(xs, ys, yerr=es, marker='o')\n";
  if (log_x) os << "plt.xscale('log')\n";
  os << "plt.xlabel('" << x_label << "')\n"
     << "plt.ylabel('mean entanglement entropy')\n"
     << "plt.tight_layout()\n"
     << "plt.savefig('" << csv_name << ".png', dpi=150)\n"
     << "print('wrote " << csv_name << ".png')\n";
}

int cmd_squid_run(const GlobalArgs& g, bool compare_rsj, bool average,
                  const std::string& dump_dir) {
  config::RunConfig cfg = resolve(g, "squid");
  ensure_out_dir(cfg);
  const auto icfg = config::integrator_config(cfg);
  model::CoupledModel m = config::build_model(cfg);
  const auto initial = config::build_initial_state(cfg, m);

  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    auto dump = [&](const std::string& name, const hilbert::Matrix& mat) {
      std::ofstream os(dump_dir + "/" + name + ".txt", std::ios::binary);
      hilbert::dump_matrix(os, mat);
    };
    dump("h_mode_static", m.h_mode);
    dump("x_mode", m.x_mode);
    dump("p_mode", m.p_mode);
    dump("a_mode", m.a_mode);
    std::ofstream os(dump_dir + "/initial_state.txt", std::ios::binary);
    hilbert::dump_state(os, initial);
  }

  csv::Table t;
  if (average) {
    auto ecfg = config::ensemble_config(cfg);
    ensemble::RunOptions opts;
    opts.workers = config::effective_workers(cfg);
    opts.health = config::health_thresholds(cfg);
    opts.classifier = config::classifier_config(cfg);
    const auto stats = ensemble::run_ensemble(m, icfg, ecfg, initial, opts);
    t.header = {"tau", "x1", "p1", "x2", "p2", "S"};
    for (size_t k = 0; k < stats.times.size(); ++k)
      t.rows.push_back({stats.times[k], stats.mean_x1_series[k], stats.mean_p1_series[k],
                        stats.mean_x2_series[k], stats.mean_p2_series[k],
                        stats.mean_entropy_series[k]});
  } else {
    const auto rec = qsd::run_trajectory(m, icfg, noise::NoiseStream(cfg.seed, 0), initial,
                                         config::health_thresholds(cfg));
    t = trajectory_table(rec);
  }
  if (compare_rsj) {
    const auto np = config::make_normalized(cfg);
    const auto rsj_traj =
        rsj::integrate_rsj({0.0, 0.0, 0.0}, np, icfg.dt, icfg.t_total, icfg.sample_stride);
    t.header.push_back("phi_rsj");
    t.header.push_back("phi_dot_rsj");
    for (size_t k = 0; k < t.rows.size(); ++k) {
      const auto& s = k < rsj_traj.size() ? rsj_traj[k] : rsj_traj.back();
      t.rows[k].push_back(s.phi);
      t.rows[k].push_back(s.phi_dot);
    }
  }
  csv::write_file(cfg.out_dir + "/trajectory.csv", t);
  config::write_manifest(cfg.out_dir + "/manifest.json", cfg, g.command_echo);
  std::cout << "wrote " << cfg.out_dir << "/trajectory.csv\n";
  return 0;
}

int cmd_duffing_run(const GlobalArgs& g) {
  config::RunConfig cfg = resolve(g, "duffing");
  ensure_out_dir(cfg);
  const auto icfg = config::integrator_config(cfg);
  model::CoupledModel m = config::build_model(cfg);
  const auto initial = config::build_initial_state(cfg, m);
  const auto rec = qsd::run_trajectory(m, icfg, noise::NoiseStream(cfg.seed, 0), initial,
                                       config::health_thresholds(cfg));
  csv::write_file(cfg.out_dir + "/trajectory.csv", trajectory_table(rec));
  config::write_manifest(cfg.out_dir + "/manifest.json", cfg, g.command_echo);
  std::cout << "wrote " << cfg.out_dir << "/trajectory.csv\n";
  return 0;
}

int cmd_squid_sweep_c(const GlobalArgs& g) {
  config::RunConfig cfg = resolve(g, "squid");
  ensure_out_dir(cfg);
  const auto icfg = config::integrator_config(cfg);
  const auto ecfg = config::ensemble_config(cfg);
  ensemble::SquidSweepOptions opts;
  opts.mu = cfg.mu;
  opts.fock_dim = 0; // adapt per point; truncation health re-estimates
  opts.fock_dim_max = cfg.fock_dim_max;
  opts.frame = cfg.frame;
  opts.initial_state = cfg.initial_state;
  opts.run.workers = config::effective_workers(cfg);
  opts.run.health = config::health_thresholds(cfg);
  opts.run.classifier = config::classifier_config(cfg);
  opts.checkpoint_path = cfg.out_dir + "/sweep_c.checkpoint.json";
  opts.config_hash = config::config_hash(cfg);
  const auto base = config::make_circuit(cfg);
  const auto result = ensemble::capacitance_sweep(base, cfg.sweep_a_values, icfg, ecfg, opts);
  csv::write_file(cfg.out_dir + "/sweep_c.csv", sweep_table(result));
  write_plot_stub(cfg.out_dir + "/plot_sweep_c.py", "sweep_c.csv", "capacitance [F]", true);
  config::write_manifest(cfg.out_dir + "/manifest.json", cfg, g.command_echo);
  std::cout << "wrote " << cfg.out_dir << "/sweep_c.csv\n";
  return 0;
}

int cmd_duffing_sweep_beta(const GlobalArgs& g) {
  config::RunConfig cfg = resolve(g, "duffing");
  ensure_out_dir(cfg);
  const auto icfg = config::integrator_config(cfg);
  const auto ecfg = config::ensemble_config(cfg);
  ensemble::DuffingSweepOptions opts;
  opts.fock_dim = cfg.fock_dim;
  opts.auto_fock_dim = cfg.fock_dim <= 0;
  opts.fock_dim_max = cfg.fock_dim_max;
  opts.initial_state = cfg.initial_state == "file" ? "vacuum" : cfg.initial_state;
  opts.run.workers = config::effective_workers(cfg);
  opts.run.health = config::health_thresholds(cfg);
  opts.run.classifier = config::classifier_config(cfg);
  opts.checkpoint_path = cfg.out_dir + "/sweep_beta.checkpoint.json";
  opts.config_hash = config::config_hash(cfg);
  const auto dp = config::make_duffing(cfg);
  const auto result = ensemble::beta_sweep(dp, cfg.sweep_beta_values, icfg, ecfg, opts);
  csv::write_file(cfg.out_dir + "/sweep_beta.csv", sweep_table(result));
  write_plot_stub(cfg.out_dir + "/plot_sweep_beta.py", "sweep_beta.csv", "beta", true);
  config::write_manifest(cfg.out_dir + "/manifest.json", cfg, g.command_echo);
  std::cout << "wrote " << cfg.out_dir << "/sweep_beta.csv\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state diffusion simulator for coupled SQUID rings and Duffing oscillators"};
  app.set_version_flag("--version", std::string(version_string));
  app.require_subcommand(1);

  GlobalArgs g;
  {
    std::string echo;
    for (int i = 0; i < argc; ++i) {
      if (i) echo += ' ';
      echo += argv[i];
    }
    g.command_echo = echo;
  }
  app.add_option("--config", g.config_path, "Config file (JSON; a manifest is also accepted)");
  app.add_option("--set", g.sets, "Override a config key: --set key=value (repeatable)");
  std::string seed_opt, workers_opt, out_opt;
  app.add_option("--seed", seed_opt, "Ensemble seed (overrides config)");
  app.add_option("--workers", workers_opt, "Worker thread cap (overrides config)");
  app.add_option("--out", out_opt, "Output directory (overrides config)");

  auto* squid = app.add_subcommand("squid", "Coupled SQUID ring runs");
  squid->fallthrough();
  auto* squid_run = squid->add_subcommand("run", "Single-trajectory (or --average) run");
  squid_run->fallthrough();
  bool compare_rsj = false, average = false;
  std::string dump_dir;
  squid_run->add_flag("--compare-rsj", compare_rsj,
                      "Append the classical RSJ trajectory on the same tau grid");
  squid_run->add_flag("--average", average, "Emit ensemble-mean series instead");
  squid_run->add_option("--dump-operators", dump_dir, "Dump operator matrices to a directory");
  auto* squid_sweep = squid->add_subcommand("sweep-c", "Capacitance sweep (entropy vs C)");
  squid_sweep->fallthrough();

  auto* duffing = app.add_subcommand("duffing", "Coupled Duffing oscillator runs");
  duffing->fallthrough();
  auto* duffing_run = duffing->add_subcommand("run", "Single-trajectory run");
  duffing_run->fallthrough();
  auto* duffing_sweep = duffing->add_subcommand("sweep-beta", "beta sweep (entropy vs beta)");
  duffing_sweep->fallthrough();

  auto* validate = app.add_subcommand("validate", "Run the built-in oracle suite");
  validate->fallthrough();
  std::string filter;
  double validate_dt = 1e-3;
  validate->add_option("--filter", filter, "Only run checks whose name contains this substring");
  validate->add_option("--dt", validate_dt, "Step size for the damped-cavity check");

  CLI11_PARSE(app, argc, argv);

  if (!seed_opt.empty()) g.sets.push_back("ensemble.seed=" + seed_opt);
  if (!workers_opt.empty()) g.sets.push_back("workers=" + workers_opt);
  if (!out_opt.empty()) g.sets.push_back("out_dir=\"" + out_opt + "\"");

  try {
    if (validate->parsed()) {
      const int failures = tools::run_validation(filter, validate_dt);
      return failures == 0 ? 0 : 1;
    }
    if (squid->parsed() && squid_run->parsed())
      return cmd_squid_run(g, compare_rsj, average, dump_dir);
    if (squid->parsed() && squid_sweep->parsed()) return cmd_squid_sweep_c(g);
    if (duffing->parsed() && duffing_run->parsed()) return cmd_duffing_run(g);
    if (duffing->parsed() && duffing_sweep->parsed()) return cmd_duffing_sweep_beta(g);
    std::cerr << "error: missing subcommand (try --help)\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
