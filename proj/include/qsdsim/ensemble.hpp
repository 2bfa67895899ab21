// Parallel ensemble execution, point-by-point entropy averaging, spectral
// entrainment classification, sweep orchestration and checkpointing.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsdsim/model.hpp"
#include "qsdsim/qsd.hpp"

namespace qsdsim::ensemble {

struct EnsembleConfig {
  int n_trajectories = 16;
  std::uint64_t seed = 1;
  double t_transient = 0.0; // dimensionless time discarded before averaging
  double convergence_target = 0.01;

  void validate(double t_total) const;
};

// Spectral entrainment test: a series is entrained when more than
// `power_threshold` of its non-DC spectral power lies within
// +-freq_window_rel of the drive frequency and its harmonics.
struct ClassifierConfig {
  double power_threshold = 0.95;
  double freq_window_rel = 0.05;
  int n_harmonics = 8;
  std::string mode = "spectral"; // "spectral" | "all" (force one class)
};

struct Classification {
  bool entrained = false;
  double harmonic_fraction = 0.0;
};

// Classify a uniformly sampled series (sample spacing dt_sample) against
// drive angular frequency omega_drive. Hann-windowed, DC excluded.
Classification classify_series(const std::vector<double>& series, double dt_sample,
                               double omega_drive, const ClassifierConfig& cfg);

struct TrajectoryOutcome {
  bool ok = false;
  std::string error;
  bool entrained = false;
  double harmonic_fraction = 0.0;
  double tau_entrained = -1.0; // first window from which classification stays entrained; -1 = never
  double time_mean_entropy = 0.0;
  long long health_warnings = 0;
  double max_occupancy = 0.0;
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_entropy_series;
  std::vector<double> mean_x1_series, mean_p1_series, mean_x2_series, mean_p2_series;
  double grand_mean_entropy = 0.0;     // point-by-point route, then time mean (post-transient)
  double traj_then_time_mean = 0.0;    // per-trajectory time means, then trajectory mean
  double stderr_grand = 0.0;           // SE of per-trajectory time means
  int n_used = 0;
  int n_failed = 0;
  bool converged = false;
  bool degraded = false;
  double mean_S_entrained = 0.0;
  double mean_S_chaotic = 0.0;
  int n_entrained = 0;
  int n_chaotic = 0;
  int fock_dim = 0;
  long long health_warnings = 0; // total across trajectories
  double max_occupancy = 0.0;
  std::vector<TrajectoryOutcome> outcomes;
};

struct RunOptions {
  int workers = 1;
  qsd::HealthThresholds health;
  ClassifierConfig classifier;
};

// Launches n_trajectories independent trajectories with indices 0..n-1 and
// aggregates deterministically by index (scheduler independent).
EnsembleStats run_ensemble(const model::CoupledModel& m, const qsd::IntegratorConfig& icfg,
                           const EnsembleConfig& ecfg, const hilbert::StateVector& initial,
                           const RunOptions& opts);

struct SweepPoint {
  double axis_value = 0.0;
  int fock_dim = 0;
  bool failed = false; // the whole point failed to set up/run
  std::string error;
  EnsembleStats stats;
};

struct SweepResult {
  std::string axis_name;
  std::string model_label;
  std::vector<SweepPoint> points;
};

struct SquidSweepOptions {
  double mu = 0.2;
  int fock_dim = 0;       // 0 = adapt per point
  int fock_dim_max = 192; // adaptation cap
  std::string frame = "bias"; // "bias" | "well" | "none"
  std::string initial_state = "displaced_vacuum";
  RunOptions run;
  std::string checkpoint_path; // empty = no checkpointing
  std::string config_hash;
};

struct DuffingSweepOptions {
  int fock_dim = 15;
  int fock_dim_max = 192;
  bool auto_fock_dim = false;
  std::string initial_state = "vacuum";
  RunOptions run;
  std::string checkpoint_path;
  std::string config_hash;
};

// Frame offset (quadrature units) for a SQUID run: static bias, nearest
// stable well, or the untranslated basis.
double squid_frame_offset(const model::NormalizedParams& np, const std::string& frame);

// Fock dimension estimate for a SQUID point: classical RSJ excursion plus
// coherent-tail margin, confirmed/bumped by a short pilot trajectory.
int estimate_squid_fock_dim(const model::NormalizedParams& np, const qsd::IntegratorConfig& icfg,
                            const SquidSweepOptions& opts);

// For each a: scale_params(base, a, 1) -> derive_dimensionless -> ensemble.
// The sweep continues past degraded points; axis must be strictly monotone.
SweepResult capacitance_sweep(const model::CircuitParams& base, const std::vector<double>& a_values,
                              const qsd::IntegratorConfig& icfg, const EnsembleConfig& ecfg,
                              const SquidSweepOptions& opts);

SweepResult beta_sweep(const model::DuffingParams& dp_base, const std::vector<double>& beta_values,
                       const qsd::IntegratorConfig& icfg, const EnsembleConfig& ecfg,
                       const DuffingSweepOptions& opts);

// Checkpoint container (versioned JSON with a config hash). Loading refuses
// mismatched hashes; an empty file is treated as a clean start.
struct Checkpoint {
  std::string config_hash;
  SweepResult partial;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);
std::optional<Checkpoint> load_checkpoint(const std::string& path, const std::string& expect_hash);

} // namespace qsdsim::ensemble
