#include "qsdsim/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qsdsim/constants.hpp"
#include "qsdsim/errors.hpp"
#include "qsdsim/version.hpp"

namespace qsdsim::config {

using nlohmann::json;

namespace {

json defaults_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["circuit"] = {{"C", c.C},
                  {"L", c.L},
                  {"R", c.R},
                  {"Id", c.Id},
                  {"omega_d_ratio", c.omega_d_ratio},
                  {"phi_x", c.phi_x},
                  {"beta_squid", c.beta_squid}};
  j["duffing"] = {{"beta", c.duffing_beta}, {"g", c.duffing_g}, {"Gamma", c.duffing_Gamma}};
  j["mu"] = c.mu;
  j["fock_dim"] = c.fock_dim;
  j["fock_dim_max"] = c.fock_dim_max;
  j["scale"] = {{"a", c.scale_a}, {"b", c.scale_b}};
  j["initial_state"] = c.initial_state;
  j["initial_state_file"] = c.initial_state_file;
  j["frame"] = c.frame;
  j["overrides"] = {{"zeta", c.zeta_override ? json(*c.zeta_override) : json(nullptr)}};
  j["integrator"] = {{"dt", c.dt},
                     {"t_total_periods", c.t_total_periods},
                     {"sample_stride", c.sample_stride},
                     {"renormalize_every", c.renormalize_every}};
  j["ensemble"] = {{"n_trajectories", c.n_trajectories},
                   {"seed", c.seed},
                   {"t_transient_periods", c.t_transient_periods},
                   {"convergence_target", c.convergence_target}};
  j["classifier"] = {{"power_threshold", c.classifier_power_threshold},
                     {"freq_window_rel", c.classifier_freq_window_rel},
                     {"n_harmonics", c.classifier_n_harmonics},
                     {"mode", c.classifier_mode}};
  j["truncation"] = {{"warn", c.trunc_warn}, {"abort", c.trunc_abort}};
  j["sweep"] = {{"a_values", c.sweep_a_values}, {"beta_values", c.sweep_beta_values}};
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  return j;
}

// Merge `patch` into `base`, rejecting keys absent from the schema.
void merge_checked(json& base, const json& patch, const std::string& prefix) {
  if (!patch.is_object())
    throw ConfigError("config: expected an object at '" + (prefix.empty() ? "<root>" : prefix) + "'");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && !slot.empty() && it.key() != "overrides") {
      merge_checked(slot, it.value(), path);
    } else {
      slot = it.value();
    }
  }
}

json parse_scalar(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text); // bare string value
  }
}

void apply_set(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const json value = parse_scalar(assignment.substr(eq + 1));

  // Convenience aliases for common knobs.
  static const std::vector<std::pair<std::string, std::string>> aliases = {
      {"zeta", "overrides.zeta"},
      {"dt", "integrator.dt"},
      {"t_total_periods", "integrator.t_total_periods"},
      {"sample_stride", "integrator.sample_stride"},
      {"renormalize_every", "integrator.renormalize_every"},
      {"seed", "ensemble.seed"},
      {"n_trajectories", "ensemble.n_trajectories"},
      {"t_transient_periods", "ensemble.t_transient_periods"},
      {"convergence_target", "ensemble.convergence_target"},
      {"a_values", "sweep.a_values"},
      {"beta_values", "sweep.beta_values"},
      {"C", "circuit.C"},
      {"L", "circuit.L"},
      {"R", "circuit.R"},
      {"Id", "circuit.Id"},
      {"omega_d_ratio", "circuit.omega_d_ratio"},
      {"phi_x", "circuit.phi_x"},
      {"beta_squid", "circuit.beta_squid"},
      {"duffing.beta", "duffing.beta"},
      {"a", "scale.a"},
      {"b", "scale.b"},
  };
  for (const auto& [from, to] : aliases)
    if (key == from) {
      key = to;
      break;
    }

  json* node = &root;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) throw ConfigError("config: unknown key '" + key + "'");
    node = &(*node)[parts[i]];
  }
  if (parts.empty() || !node->contains(parts.back()))
    throw ConfigError("config: unknown key '" + key + "'");
  (*node)[parts.back()] = value;
}

template <class T>
T get_typed(const json& j, const std::string& path, const char* type_name) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: key '" + path + "' must be " + type_name);
  }
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.model = get_typed<std::string>(j.at("model"), "model", "a string");
  if (c.model != "squid" && c.model != "duffing")
    throw ConfigError("config: model must be 'squid' or 'duffing', got '" + c.model + "'");
  const json& cc = j.at("circuit");
  c.C = get_typed<double>(cc.at("C"), "circuit.C", "a number");
  c.L = get_typed<double>(cc.at("L"), "circuit.L", "a number");
  c.R = get_typed<double>(cc.at("R"), "circuit.R", "a number");
  c.Id = get_typed<double>(cc.at("Id"), "circuit.Id", "a number");
  c.omega_d_ratio = get_typed<double>(cc.at("omega_d_ratio"), "circuit.omega_d_ratio", "a number");
  c.phi_x = get_typed<double>(cc.at("phi_x"), "circuit.phi_x", "a number");
  c.beta_squid = get_typed<double>(cc.at("beta_squid"), "circuit.beta_squid", "a number");
  const json& dd = j.at("duffing");
  c.duffing_beta = get_typed<double>(dd.at("beta"), "duffing.beta", "a number");
  c.duffing_g = get_typed<double>(dd.at("g"), "duffing.g", "a number");
  c.duffing_Gamma = get_typed<double>(dd.at("Gamma"), "duffing.Gamma", "a number");
  c.mu = get_typed<double>(j.at("mu"), "mu", "a number");
  c.fock_dim = get_typed<int>(j.at("fock_dim"), "fock_dim", "an integer");
  c.fock_dim_max = get_typed<int>(j.at("fock_dim_max"), "fock_dim_max", "an integer");
  c.scale_a = get_typed<double>(j.at("scale").at("a"), "scale.a", "a number");
  c.scale_b = get_typed<double>(j.at("scale").at("b"), "scale.b", "a number");
  c.initial_state = get_typed<std::string>(j.at("initial_state"), "initial_state", "a string");
  c.initial_state_file =
      get_typed<std::string>(j.at("initial_state_file"), "initial_state_file", "a string");
  c.frame = get_typed<std::string>(j.at("frame"), "frame", "a string");
  const json& z = j.at("overrides").at("zeta");
  if (!z.is_null()) c.zeta_override = get_typed<double>(z, "overrides.zeta", "a number or null");
  const json& ic = j.at("integrator");
  c.dt = get_typed<double>(ic.at("dt"), "integrator.dt", "a number");
  c.t_total_periods =
      get_typed<double>(ic.at("t_total_periods"), "integrator.t_total_periods", "a number");
  c.sample_stride = get_typed<int>(ic.at("sample_stride"), "integrator.sample_stride", "an integer");
  c.renormalize_every =
      get_typed<int>(ic.at("renormalize_every"), "integrator.renormalize_every", "an integer");
  const json& ec = j.at("ensemble");
  c.n_trajectories = get_typed<int>(ec.at("n_trajectories"), "ensemble.n_trajectories", "an integer");
  c.seed = get_typed<std::uint64_t>(ec.at("seed"), "ensemble.seed", "an unsigned integer");
  c.t_transient_periods =
      get_typed<double>(ec.at("t_transient_periods"), "ensemble.t_transient_periods", "a number");
  c.convergence_target =
      get_typed<double>(ec.at("convergence_target"), "ensemble.convergence_target", "a number");
  const json& cl = j.at("classifier");
  c.classifier_power_threshold =
      get_typed<double>(cl.at("power_threshold"), "classifier.power_threshold", "a number");
  c.classifier_freq_window_rel =
      get_typed<double>(cl.at("freq_window_rel"), "classifier.freq_window_rel", "a number");
  c.classifier_n_harmonics =
      get_typed<int>(cl.at("n_harmonics"), "classifier.n_harmonics", "an integer");
  c.classifier_mode = get_typed<std::string>(cl.at("mode"), "classifier.mode", "a string");
  if (c.classifier_mode != "spectral" && c.classifier_mode != "all")
    throw ConfigError("config: classifier.mode must be 'spectral' or 'all'");
  c.trunc_warn = get_typed<double>(j.at("truncation").at("warn"), "truncation.warn", "a number");
  c.trunc_abort = get_typed<double>(j.at("truncation").at("abort"), "truncation.abort", "a number");
  c.sweep_a_values =
      get_typed<std::vector<double>>(j.at("sweep").at("a_values"), "sweep.a_values", "an array");
  c.sweep_beta_values = get_typed<std::vector<double>>(j.at("sweep").at("beta_values"),
                                                       "sweep.beta_values", "an array");
  c.workers = get_typed<int>(j.at("workers"), "workers", "an integer");
  c.out_dir = get_typed<std::string>(j.at("out_dir"), "out_dir", "a string");
  return c;
}

} // namespace

RunConfig load(const std::string& config_path, const std::vector<std::string>& set_overrides) {
  json root = defaults_json(RunConfig{});

  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file '" + config_path + "'");
    json file;
    try {
      file = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + config_path + "': " + e.what());
    }
    // A manifest is accepted wherever a config is: its resolved_config is used.
    if (file.contains("resolved_config")) file = file.at("resolved_config");
    merge_checked(root, file, "");
  }

  if (const char* env_set = std::getenv("QSDSIM_SET")) {
    std::stringstream ss(env_set);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (!item.empty()) apply_set(root, item);
  }
  if (const char* env_workers = std::getenv("QSDSIM_WORKERS"))
    apply_set(root, std::string("workers=") + env_workers);

  for (const auto& s : set_overrides) apply_set(root, s);
  return from_json(root);
}

std::string to_json_string(const RunConfig& cfg) { return defaults_json(cfg).dump(1); }

std::string config_hash(const RunConfig& cfg) {
  json j = defaults_json(cfg);
  j.erase("workers");
  j.erase("out_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

model::CircuitParams make_circuit(const RunConfig& cfg) {
  model::CircuitParams p;
  p.C = cfg.C;
  p.L = cfg.L;
  p.R = cfg.R;
  p.I_c = model::critical_current_for_beta(cfg.beta_squid, cfg.L);
  p.I_d = cfg.Id;
  p.omega_d = cfg.omega_d_ratio / std::sqrt(cfg.L * cfg.C);
  p.Phi_x_dc = cfg.phi_x * constants::flux_quantum;
  p.validate();
  if (cfg.scale_a != 1.0 || cfg.scale_b != 1.0)
    p = model::scale_params(p, cfg.scale_a, cfg.scale_b);
  return p;
}

model::NormalizedParams make_normalized(const RunConfig& cfg) {
  model::NormalizedParams np = model::derive_dimensionless(make_circuit(cfg));
  if (cfg.zeta_override) {
    if (*cfg.zeta_override < 0.0) throw ConfigError("overrides.zeta must be >= 0");
    np.zeta = *cfg.zeta_override;
  }
  return np;
}

model::DuffingParams make_duffing(const RunConfig& cfg) {
  model::DuffingParams dp;
  dp.beta = cfg.duffing_beta;
  dp.g = cfg.duffing_g;
  dp.Gamma = cfg.zeta_override ? *cfg.zeta_override : cfg.duffing_Gamma;
  dp.mu = cfg.mu;
  dp.validate();
  return dp;
}

double drive_period(const RunConfig& cfg) {
  if (cfg.model == "duffing") return 2.0 * constants::pi;
  const model::NormalizedParams np = make_normalized(cfg);
  return 2.0 * constants::pi / np.omega;
}

qsd::IntegratorConfig integrator_config(const RunConfig& cfg) {
  qsd::IntegratorConfig ic;
  ic.dt = cfg.dt;
  ic.t_total = cfg.t_total_periods * drive_period(cfg);
  ic.sample_stride = cfg.sample_stride;
  ic.renormalize_every = cfg.renormalize_every;
  ic.validate();
  return ic;
}

ensemble::EnsembleConfig ensemble_config(const RunConfig& cfg) {
  ensemble::EnsembleConfig ec;
  ec.n_trajectories = cfg.n_trajectories;
  ec.seed = cfg.seed;
  ec.t_transient = cfg.t_transient_periods * drive_period(cfg);
  ec.convergence_target = cfg.convergence_target;
  return ec;
}

ensemble::ClassifierConfig classifier_config(const RunConfig& cfg) {
  ensemble::ClassifierConfig cc;
  cc.power_threshold = cfg.classifier_power_threshold;
  cc.freq_window_rel = cfg.classifier_freq_window_rel;
  cc.n_harmonics = cfg.classifier_n_harmonics;
  cc.mode = cfg.classifier_mode;
  return cc;
}

qsd::HealthThresholds health_thresholds(const RunConfig& cfg) {
  return {cfg.trunc_warn, cfg.trunc_abort};
}

int effective_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

model::CoupledModel build_model(const RunConfig& cfg) {
  if (cfg.model == "duffing") return model::make_duffing_model(make_duffing(cfg), cfg.fock_dim);
  const model::NormalizedParams np = make_normalized(cfg);
  const double frame = ensemble::squid_frame_offset(np, cfg.frame);
  return model::make_squid_model(np, cfg.fock_dim, cfg.mu, frame);
}

hilbert::StateVector build_initial_state(const RunConfig& cfg, const model::CoupledModel& m) {
  return qsd::default_initial_state(m, cfg.initial_state, cfg.initial_state_file);
}

std::string manifest_json(const RunConfig& cfg, const std::string& command) {
  json j;
  j["format"] = "qsdsim-manifest";
  j["version"] = 1;
  j["code_version"] = std::string(version_string);
  j["command"] = command;
  j["resolved_config"] = json::parse(to_json_string(cfg));
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["constants"] = {{"h", constants::planck_h},
                    {"hbar", constants::hbar},
                    {"e", constants::electron_charge},
                    {"Phi0", constants::flux_quantum}};
  if (cfg.model == "squid") {
    const model::NormalizedParams np = make_normalized(cfg);
    j["derived"] = {{"omega0", np.omega0},
                    {"beta_squid", np.beta_squid},
                    {"zeta", np.zeta},
                    {"phi_d", np.phi_d},
                    {"omega", np.omega},
                    {"phi_x", np.phi_x},
                    {"Omega", np.Omega},
                    {"cos_prefactor", np.cos_prefactor},
                    {"x_unit", model::flux_quadrature_unit(np)},
                    {"frame_offset", ensemble::squid_frame_offset(np, cfg.frame)},
                    {"drive_period", drive_period(cfg)}};
  } else {
    j["derived"] = {{"drive_period", drive_period(cfg)}};
  }
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  j["timestamp_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  return j.dump(1);
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write manifest '" + path + "'");
  os << manifest_json(cfg, command) << "\n";
}

} // namespace qsdsim::config
