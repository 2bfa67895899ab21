#include "qsdsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "qsdsim/constants.hpp"
#include "qsdsim/errors.hpp"
#include "qsdsim/rsj.hpp"

namespace qsdsim::ensemble {

using nlohmann::json;

void EnsembleConfig::validate(double t_total) const {
  if (n_trajectories < 1) throw ConfigError("EnsembleConfig: n_trajectories must be >= 1");
  if (t_transient < 0.0 || t_transient >= t_total)
    throw ConfigError("EnsembleConfig: t_transient must satisfy 0 <= t_transient < t_total");
  if (!(convergence_target > 0.0)) throw ConfigError("EnsembleConfig: convergence_target must be > 0");
}

Classification classify_series(const std::vector<double>& series, double dt_sample,
                               double omega_drive, const ClassifierConfig& cfg) {
  Classification out;
  if (cfg.mode == "all") {
    out.entrained = true;
    out.harmonic_fraction = 1.0;
    return out;
  }
  const int m = int(series.size());
  if (m < 16 || !(dt_sample > 0.0) || !(omega_drive > 0.0)) return out;

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= m;
  if (var <= 1e-24 * std::max(mean * mean, 1e-300)) {
    // Constant series: a settled fixed point counts as (trivially) entrained.
    out.entrained = true;
    out.harmonic_fraction = 1.0;
    return out;
  }
  std::vector<double> y(m);
  double sum_sq = 0.0, sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * constants::pi * k / (m - 1)));
    y[k] = w * (series[k] - mean);
    sum_sq += y[k] * y[k];
    sum += y[k];
  }
  const double total_all = double(m) * sum_sq;     // Parseval
  const double total_ex_dc = total_all - sum * sum; // minus |S_0|^2
  if (total_ex_dc <= 1e-12 * std::max(total_all, 1e-300)) {
    out.entrained = true;
    out.harmonic_fraction = 1.0;
    return out;
  }

  const double bin_w = 2.0 * constants::pi / (double(m) * dt_sample); // rad per bin
  const double nyquist = constants::pi / dt_sample;
  const int half = m / 2;
  std::vector<char> selected(half + 1, 0);
  for (int h = 1; h <= cfg.n_harmonics; ++h) {
    const double target = h * omega_drive;
    if (target > nyquist) break;
    const double width = cfg.freq_window_rel * target;
    int j_lo = int(std::floor((target - width) / bin_w));
    int j_hi = int(std::ceil((target + width) / bin_w));
    const int j_near = int(std::llround(target / bin_w));
    j_lo = std::min(j_lo, j_near - 1);
    j_hi = std::max(j_hi, j_near + 1);
    for (int j = std::max(1, j_lo); j <= std::min(half, j_hi); ++j) selected[j] = 1;
  }

  double harmonic_power = 0.0;
  for (int j = 1; j <= half; ++j) {
    if (!selected[j]) continue;
    double re = 0.0, im = 0.0;
    const double w = 2.0 * constants::pi * j / m;
    for (int k = 0; k < m; ++k) {
      re += y[k] * std::cos(w * k);
      im -= y[k] * std::sin(w * k);
    }
    const double weight = (2 * j == m) ? 1.0 : 2.0; // mirror bin
    harmonic_power += weight * (re * re + im * im);
  }
  out.harmonic_fraction = std::min(1.0, harmonic_power / total_ex_dc);
  out.entrained = out.harmonic_fraction >= cfg.power_threshold;
  return out;
}

namespace {

// First time from which non-overlapping 20-period windows stay entrained.
double entrainment_time(const std::vector<double>& times, const std::vector<double>& series,
                        double dt_sample, double period, double omega_drive,
                        const ClassifierConfig& cfg) {
  const int m = int(series.size());
  int win = int(std::llround(20.0 * period / dt_sample));
  win = std::max(win, 64);
  if (win > m) win = m;
  const int n_win = m / win;
  if (n_win < 1) return -1.0;
  std::vector<char> ent(n_win, 0);
  for (int w = 0; w < n_win; ++w) {
    std::vector<double> seg(series.begin() + w * win, series.begin() + (w + 1) * win);
    ent[w] = classify_series(seg, dt_sample, omega_drive, cfg).entrained ? 1 : 0;
  }
  int first = -1;
  for (int w = n_win - 1; w >= 0; --w) {
    if (ent[w])
      first = w;
    else
      break;
  }
  if (first < 0) return -1.0;
  return times[size_t(first) * win];
}

std::vector<double> tail(const std::vector<double>& v, size_t from) {
  return std::vector<double>(v.begin() + from, v.end());
}

} // namespace

EnsembleStats run_ensemble(const model::CoupledModel& m, const qsd::IntegratorConfig& icfg,
                           const EnsembleConfig& ecfg, const hilbert::StateVector& initial,
                           const RunOptions& opts) {
  icfg.validate();
  ecfg.validate(icfg.t_total);
  const int n = ecfg.n_trajectories;
  std::vector<std::optional<qsd::TrajectoryRecord>> recs(n);
  std::vector<std::string> errors(n);

  const int workers = std::max(1, std::min(opts.workers, n));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        recs[i] = qsd::run_trajectory(m, icfg, noise::NoiseStream(ecfg.seed, std::uint64_t(i)),
                                      initial, opts.health);
      } catch (const NumericalError& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  EnsembleStats stats;
  stats.fock_dim = m.n;
  stats.outcomes.resize(n);

  // Deterministic ordered reduction by trajectory index.
  size_t n_samples = 0;
  for (int i = 0; i < n; ++i)
    if (recs[i]) {
      n_samples = recs[i]->size();
      if (stats.times.empty()) stats.times = recs[i]->times;
    }
  for (auto* v : {&stats.mean_entropy_series, &stats.mean_x1_series, &stats.mean_p1_series,
                  &stats.mean_x2_series, &stats.mean_p2_series})
    v->assign(n_samples, 0.0);

  size_t transient_from = 0;
  while (transient_from < stats.times.size() && stats.times[transient_from] <= ecfg.t_transient)
    ++transient_from;
  if (!stats.times.empty() && transient_from >= stats.times.size())
    transient_from = stats.times.size() - 1;

  std::vector<double> traj_time_means;
  std::vector<double> running_grand; // grand mean after including trajectory i (point-by-point route)
  std::vector<double> accum(n_samples, 0.0);
  const double period = m.drive_period;
  const double omega_drive = 2.0 * constants::pi / period;
  const double dt_sample = icfg.dt * icfg.sample_stride;

  for (int i = 0; i < n; ++i) {
    auto& oc = stats.outcomes[i];
    if (!recs[i]) {
      oc.ok = false;
      oc.error = errors[i];
      ++stats.n_failed;
      continue;
    }
    const auto& r = *recs[i];
    oc.ok = true;
    oc.health_warnings = r.metadata.health_warnings;
    oc.max_occupancy = r.metadata.max_occupancy;
    stats.health_warnings += r.metadata.health_warnings;
    stats.max_occupancy = std::max(stats.max_occupancy, r.metadata.max_occupancy);
    ++stats.n_used;
    for (size_t k = 0; k < n_samples; ++k) {
      accum[k] += r.entropy[k];
      stats.mean_x1_series[k] += r.exp_x1[k];
      stats.mean_p1_series[k] += r.exp_p1[k];
      stats.mean_x2_series[k] += r.exp_x2[k];
      stats.mean_p2_series[k] += r.exp_p2[k];
    }
    double tm = 0.0;
    size_t cnt = 0;
    for (size_t k = transient_from; k < n_samples; ++k) {
      tm += r.entropy[k];
      ++cnt;
    }
    oc.time_mean_entropy = cnt ? tm / double(cnt) : 0.0;
    traj_time_means.push_back(oc.time_mean_entropy);

    const auto seg1 = tail(r.exp_x1, transient_from);
    const auto seg2 = tail(r.exp_x2, transient_from);
    const auto c1 = classify_series(seg1, dt_sample, omega_drive, opts.classifier);
    const auto c2 = classify_series(seg2, dt_sample, omega_drive, opts.classifier);
    oc.entrained = c1.entrained && c2.entrained;
    oc.harmonic_fraction = 0.5 * (c1.harmonic_fraction + c2.harmonic_fraction);
    oc.tau_entrained =
        entrainment_time(r.times, r.exp_x1, dt_sample, period, omega_drive, opts.classifier);

    // Running grand mean over the first (i+1) usable trajectories.
    double g = 0.0;
    size_t gcnt = 0;
    for (size_t k = transient_from; k < n_samples; ++k) {
      g += accum[k] / double(stats.n_used);
      ++gcnt;
    }
    running_grand.push_back(gcnt ? g / double(gcnt) : 0.0);
  }

  if (stats.n_used > 0) {
    for (size_t k = 0; k < n_samples; ++k) {
      stats.mean_entropy_series[k] = accum[k] / double(stats.n_used);
      stats.mean_x1_series[k] /= double(stats.n_used);
      stats.mean_p1_series[k] /= double(stats.n_used);
      stats.mean_x2_series[k] /= double(stats.n_used);
      stats.mean_p2_series[k] /= double(stats.n_used);
    }
    double g = 0.0;
    size_t gcnt = 0;
    for (size_t k = transient_from; k < n_samples; ++k) {
      g += stats.mean_entropy_series[k];
      ++gcnt;
    }
    stats.grand_mean_entropy = gcnt ? g / double(gcnt) : 0.0;

    double tmean = 0.0;
    for (double v : traj_time_means) tmean += v;
    tmean /= double(traj_time_means.size());
    stats.traj_then_time_mean = tmean;
    if (traj_time_means.size() >= 2) {
      double ss = 0.0;
      for (double v : traj_time_means) ss += (v - tmean) * (v - tmean);
      stats.stderr_grand =
          std::sqrt(ss / (double(traj_time_means.size()) * double(traj_time_means.size() - 1)));
    }

    // Convergence: did the final ~10% of trajectories move the grand mean?
    const int n_ok = stats.n_used;
    const int n_final = std::max(1, int(std::llround(0.1 * n_ok)));
    if (n_ok - n_final >= 1) {
      const double before = running_grand[size_t(n_ok - n_final) - 1];
      const double after = running_grand[size_t(n_ok) - 1];
      const double denom = std::max(std::abs(after), 1e-15);
      stats.converged = std::abs(after - before) / denom < ecfg.convergence_target;
    }

    double se = 0.0, sc = 0.0;
    for (const auto& oc : stats.outcomes) {
      if (!oc.ok) continue;
      if (oc.entrained) {
        se += oc.time_mean_entropy;
        ++stats.n_entrained;
      } else {
        sc += oc.time_mean_entropy;
        ++stats.n_chaotic;
      }
    }
    if (stats.n_entrained) stats.mean_S_entrained = se / stats.n_entrained;
    if (stats.n_chaotic) stats.mean_S_chaotic = sc / stats.n_chaotic;
  }
  stats.degraded = stats.n_failed > 0;
  return stats;
}

double squid_frame_offset(const model::NormalizedParams& np, const std::string& frame) {
  if (frame == "none") return 0.0;
  const double x_unit = model::flux_quadrature_unit(np);
  if (frame == "bias") return x_unit * np.phi_x;
  if (frame == "well") {
    const auto wells = rsj::equilibrium_roots(np, /*stable_only=*/true);
    if (wells.empty()) return x_unit * np.phi_x;
    // Nearest stable well at or above the bias; wells come sorted.
    double best = wells.front();
    for (double w : wells)
      if (std::abs(w) < std::abs(best)) best = w;
    if (best < 0.0) best = -best; // symmetric pair; pick the positive one
    return x_unit * (np.phi_x + best);
  }
  throw ConfigError("unknown frame '" + frame + "' (expected bias|well|none)");
}

namespace {

int margin_dim(double nbar) {
  return int(std::ceil(nbar + 6.5 * std::sqrt(nbar + 1.0) + 12.0));
}

} // namespace

int estimate_squid_fock_dim(const model::NormalizedParams& np, const qsd::IntegratorConfig& icfg,
                            const SquidSweepOptions& opts) {
  const double x_unit = model::flux_quadrature_unit(np);
  const double frame = squid_frame_offset(np, opts.frame);
  const double frame_flux = frame / x_unit;
  const double period = 2.0 * constants::pi / np.omega;
  const double t_est = std::min(icfg.t_total, 60.0 * period);
  const auto traj = rsj::integrate_rsj({0.0, 0.0, 0.0}, np, 1e-3, t_est, 10);
  double nbar = 0.0;
  for (const auto& s : traj) {
    const double xq = x_unit * (s.phi + np.phi_x - frame_flux);
    const double pq = x_unit * s.phi_dot;
    nbar = std::max(nbar, 0.5 * (xq * xq + pq * pq));
  }
  int n = std::max(8, margin_dim(nbar));
  n = std::min(n, opts.fock_dim_max);

  // Short pilot trajectory; grow on truncation pressure.
  for (int attempt = 0; attempt < 5; ++attempt) {
    model::CoupledModel m = model::make_squid_model(np, n, opts.mu, frame);
    qsd::IntegratorConfig pcfg = icfg;
    pcfg.t_total = std::min(icfg.t_total, 8.0 * period);
    bool grow = false;
    try {
      const auto rec = qsd::run_trajectory(m, pcfg, noise::NoiseStream(0x9d100f0cULL, 0),
                                           qsd::default_initial_state(m, opts.initial_state),
                                           opts.run.health);
      if (rec.metadata.max_occupancy > opts.run.health.warn) grow = true;
    } catch (const TruncationError&) {
      grow = true;
    }
    if (!grow) return n;
    if (n >= opts.fock_dim_max)
      throw NumericalError("fock dimension estimate exceeds cap " +
                           std::to_string(opts.fock_dim_max) + " (needed > " + std::to_string(n) +
                           ")");
    n = std::min(opts.fock_dim_max, int(std::ceil(n * 1.3)) + 8);
  }
  return n;
}

namespace {

void check_monotone(const std::vector<double>& axis, const char* what) {
  if (axis.empty()) throw ConfigError(std::string(what) + ": empty axis");
  bool inc = true, dec = true;
  for (size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) inc = false;
    if (!(axis[i] < axis[i - 1])) dec = false;
  }
  if (!inc && !dec) throw ConfigError(std::string(what) + ": axis must be strictly monotone");
}

json stats_to_json(const EnsembleStats& s) {
  json j;
  j["times"] = s.times;
  j["mean_entropy_series"] = s.mean_entropy_series;
  j["mean_x1_series"] = s.mean_x1_series;
  j["mean_p1_series"] = s.mean_p1_series;
  j["mean_x2_series"] = s.mean_x2_series;
  j["mean_p2_series"] = s.mean_p2_series;
  j["grand_mean_entropy"] = s.grand_mean_entropy;
  j["traj_then_time_mean"] = s.traj_then_time_mean;
  j["stderr_grand"] = s.stderr_grand;
  j["n_used"] = s.n_used;
  j["n_failed"] = s.n_failed;
  j["converged"] = s.converged;
  j["degraded"] = s.degraded;
  j["mean_S_entrained"] = s.mean_S_entrained;
  j["mean_S_chaotic"] = s.mean_S_chaotic;
  j["n_entrained"] = s.n_entrained;
  j["n_chaotic"] = s.n_chaotic;
  j["fock_dim"] = s.fock_dim;
  j["health_warnings"] = s.health_warnings;
  j["max_occupancy"] = s.max_occupancy;
  json ocs = json::array();
  for (const auto& oc : s.outcomes) {
    ocs.push_back({{"ok", oc.ok},
                   {"error", oc.error},
                   {"entrained", oc.entrained},
                   {"harmonic_fraction", oc.harmonic_fraction},
                   {"tau_entrained", oc.tau_entrained},
                   {"time_mean_entropy", oc.time_mean_entropy},
                   {"health_warnings", oc.health_warnings},
                   {"max_occupancy", oc.max_occupancy}});
  }
  j["outcomes"] = ocs;
  return j;
}

EnsembleStats stats_from_json(const json& j) {
  EnsembleStats s;
  s.times = j.at("times").get<std::vector<double>>();
  s.mean_entropy_series = j.at("mean_entropy_series").get<std::vector<double>>();
  s.mean_x1_series = j.at("mean_x1_series").get<std::vector<double>>();
  s.mean_p1_series = j.at("mean_p1_series").get<std::vector<double>>();
  s.mean_x2_series = j.at("mean_x2_series").get<std::vector<double>>();
  s.mean_p2_series = j.at("mean_p2_series").get<std::vector<double>>();
  s.grand_mean_entropy = j.at("grand_mean_entropy").get<double>();
  s.traj_then_time_mean = j.at("traj_then_time_mean").get<double>();
  s.stderr_grand = j.at("stderr_grand").get<double>();
  s.n_used = j.at("n_used").get<int>();
  s.n_failed = j.at("n_failed").get<int>();
  s.converged = j.at("converged").get<bool>();
  s.degraded = j.at("degraded").get<bool>();
  s.mean_S_entrained = j.at("mean_S_entrained").get<double>();
  s.mean_S_chaotic = j.at("mean_S_chaotic").get<double>();
  s.n_entrained = j.at("n_entrained").get<int>();
  s.n_chaotic = j.at("n_chaotic").get<int>();
  s.fock_dim = j.at("fock_dim").get<int>();
  s.health_warnings = j.at("health_warnings").get<long long>();
  s.max_occupancy = j.at("max_occupancy").get<double>();
  for (const auto& o : j.at("outcomes")) {
    TrajectoryOutcome oc;
    oc.ok = o.at("ok").get<bool>();
    oc.error = o.at("error").get<std::string>();
    oc.entrained = o.at("entrained").get<bool>();
    oc.harmonic_fraction = o.at("harmonic_fraction").get<double>();
    oc.tau_entrained = o.at("tau_entrained").get<double>();
    oc.time_mean_entropy = o.at("time_mean_entropy").get<double>();
    oc.health_warnings = o.at("health_warnings").get<long long>();
    oc.max_occupancy = o.at("max_occupancy").get<double>();
    s.outcomes.push_back(oc);
  }
  return s;
}

json point_to_json(const SweepPoint& p) {
  json j;
  j["axis_value"] = p.axis_value;
  j["fock_dim"] = p.fock_dim;
  j["failed"] = p.failed;
  j["error"] = p.error;
  j["stats"] = stats_to_json(p.stats);
  return j;
}

SweepPoint point_from_json(const json& j) {
  SweepPoint p;
  p.axis_value = j.at("axis_value").get<double>();
  p.fock_dim = j.at("fock_dim").get<int>();
  p.failed = j.at("failed").get<bool>();
  p.error = j.at("error").get<std::string>();
  p.stats = stats_from_json(j.at("stats"));
  return p;
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  json j;
  j["format"] = "qsdsim-sweep-checkpoint";
  j["version"] = 1;
  j["config_hash"] = cp.config_hash;
  j["axis_name"] = cp.partial.axis_name;
  j["model_label"] = cp.partial.model_label;
  json pts = json::array();
  for (const auto& p : cp.partial.points) pts.push_back(point_to_json(p));
  j["points"] = pts;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw CheckpointError("cannot write checkpoint '" + tmp + "'");
    os << j.dump(1);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Checkpoint> load_checkpoint(const std::string& path, const std::string& expect_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::string content((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    std::cerr << "[warn] checkpoint '" << path << "' is empty; starting clean\n";
    return std::nullopt;
  }
  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& e) {
    throw CheckpointError("corrupt checkpoint '" + path + "': " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "qsdsim-sweep-checkpoint" ||
        j.at("version").get<int>() != 1)
      throw CheckpointError("checkpoint '" + path + "' has unknown format/version");
    const std::string hash = j.at("config_hash").get<std::string>();
    if (hash != expect_hash)
      throw CheckpointError("checkpoint '" + path + "' config hash " + hash +
                            " does not match current config " + expect_hash +
                            "; refusing to resume");
    Checkpoint cp;
    cp.config_hash = hash;
    cp.partial.axis_name = j.at("axis_name").get<std::string>();
    cp.partial.model_label = j.at("model_label").get<std::string>();
    for (const auto& p : j.at("points")) cp.partial.points.push_back(point_from_json(p));
    return cp;
  } catch (const json::exception& e) {
    throw CheckpointError("corrupt checkpoint '" + path + "': " + e.what());
  }
}

SweepResult capacitance_sweep(const model::CircuitParams& base, const std::vector<double>& a_values,
                              const qsd::IntegratorConfig& icfg, const EnsembleConfig& ecfg,
                              const SquidSweepOptions& opts) {
  check_monotone(a_values, "capacitance_sweep");
  for (double a : a_values)
    if (!(a > 0.0)) throw ConfigError("capacitance_sweep: scale factors must be > 0");

  SweepResult result;
  result.axis_name = "capacitance_F";
  result.model_label = "squid";
  size_t start_from = 0;
  if (!opts.checkpoint_path.empty()) {
    if (auto cp = load_checkpoint(opts.checkpoint_path, opts.config_hash)) {
      result = cp->partial;
      start_from = result.points.size();
      if (start_from > a_values.size())
        throw CheckpointError("checkpoint has more points than the requested sweep");
      std::cerr << "[info] resuming sweep from point " << start_from << " of " << a_values.size()
                << "\n";
    }
  }

  for (size_t i = start_from; i < a_values.size(); ++i) {
    const double a = a_values[i];
    SweepPoint point;
    const model::CircuitParams scaled = model::scale_params(base, a, 1.0);
    point.axis_value = scaled.C;
    try {
      const model::NormalizedParams np = model::derive_dimensionless(scaled);
      const double frame = squid_frame_offset(np, opts.frame);
      const int n = opts.fock_dim > 0 ? opts.fock_dim : estimate_squid_fock_dim(np, icfg, opts);
      point.fock_dim = n;
      const model::CoupledModel m = model::make_squid_model(np, n, opts.mu, frame);
      const auto initial = qsd::default_initial_state(m, opts.initial_state);
      point.stats = run_ensemble(m, icfg, ecfg, initial, opts.run);
    } catch (const NumericalError& e) {
      point.failed = true;
      point.error = e.what();
      std::cerr << "[warn] sweep point a=" << a << " failed: " << e.what() << "\n";
    }
    result.points.push_back(std::move(point));
    if (!opts.checkpoint_path.empty())
      save_checkpoint(opts.checkpoint_path, Checkpoint{opts.config_hash, result});
  }
  return result;
}

SweepResult beta_sweep(const model::DuffingParams& dp_base, const std::vector<double>& beta_values,
                       const qsd::IntegratorConfig& icfg, const EnsembleConfig& ecfg,
                       const DuffingSweepOptions& opts) {
  check_monotone(beta_values, "beta_sweep");
  for (double b : beta_values)
    if (!(b > 0.0)) throw ConfigError("beta_sweep: beta values must be > 0");

  SweepResult result;
  result.axis_name = "beta";
  result.model_label = "duffing";
  size_t start_from = 0;
  if (!opts.checkpoint_path.empty()) {
    if (auto cp = load_checkpoint(opts.checkpoint_path, opts.config_hash)) {
      result = cp->partial;
      start_from = result.points.size();
      if (start_from > beta_values.size())
        throw CheckpointError("checkpoint has more points than the requested sweep");
      std::cerr << "[info] resuming sweep from point " << start_from << " of "
                << beta_values.size() << "\n";
    }
  }

  for (size_t i = start_from; i < beta_values.size(); ++i) {
    model::DuffingParams dp = dp_base;
    dp.beta = beta_values[i];
    SweepPoint point;
    point.axis_value = dp.beta;
    try {
      int n = opts.fock_dim;
      if (opts.auto_fock_dim) {
        const double q_max = 1.7 / dp.beta;
        const double p_max = 1.2 / dp.beta;
        n = std::min(opts.fock_dim_max, margin_dim(0.5 * (q_max * q_max + p_max * p_max)));
        n = std::max(n, 8);
      }
      point.fock_dim = n;
      const model::CoupledModel m = model::make_duffing_model(dp, n);
      const auto initial = qsd::default_initial_state(m, opts.initial_state);
      point.stats = run_ensemble(m, icfg, ecfg, initial, opts.run);
    } catch (const NumericalError& e) {
      point.failed = true;
      point.error = e.what();
      std::cerr << "[warn] sweep point beta=" << dp.beta << " failed: " << e.what() << "\n";
    }
    result.points.push_back(std::move(point));
    if (!opts.checkpoint_path.empty())
      save_checkpoint(opts.checkpoint_path, Checkpoint{opts.config_hash, result});
  }
  return result;
}

} // namespace qsdsim::ensemble
