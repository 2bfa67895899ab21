#include "qsdsim/model.hpp"

#include <cmath>
#include <iostream>

#include "qsdsim/constants.hpp"

namespace qsdsim::model {

namespace constants = qsdsim::constants;

void CircuitParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("CircuitParams: ") + name + " must be strictly positive");
  };
  positive(C, "C");
  positive(L, "L");
  positive(R, "R");
  positive(I_c, "I_c");
  if (I_d < 0.0 || !std::isfinite(I_d)) throw ConfigError("CircuitParams: I_d must be >= 0");
  if (!std::isfinite(omega_d) || !std::isfinite(Phi_x_dc))
    throw ConfigError("CircuitParams: omega_d and Phi_x_dc must be finite");
}

void DuffingParams::validate() const {
  if (!(beta > 0.0)) throw ConfigError("DuffingParams: beta must be > 0");
  if (Gamma < 0.0) throw ConfigError("DuffingParams: Gamma must be >= 0");
}

double critical_current_for_beta(double beta_squid, double L) {
  return beta_squid * constants::flux_quantum / (2.0 * constants::pi * L);
}

CircuitParams baseline_circuit() {
  CircuitParams p;
  p.C = 1e-13;
  p.L = 3e-10;
  p.R = 100.0;
  p.I_c = critical_current_for_beta(2.0, p.L);
  p.I_d = 0.9e-6;
  p.omega_d = 1.0 / std::sqrt(p.L * p.C);
  p.Phi_x_dc = 0.5 * constants::flux_quantum;
  p.validate();
  return p;
}

NormalizedParams derive_dimensionless(const CircuitParams& p) {
  p.validate();
  NormalizedParams np;
  np.omega0 = 1.0 / std::sqrt(p.L * p.C);
  np.zeta = 1.0 / (2.0 * np.omega0 * p.R * p.C);
  np.beta_squid = 2.0 * constants::pi * p.L * p.I_c / constants::flux_quantum;
  np.phi_d = p.I_d * p.L / constants::flux_quantum;
  np.omega = p.omega_d / np.omega0;
  np.phi_x = p.Phi_x_dc / constants::flux_quantum;
  np.Omega = std::sqrt(4.0 * constants::electron_charge * constants::electron_charge /
                       constants::hbar * std::sqrt(p.L / p.C));
  np.cos_prefactor = p.I_c / (2.0 * constants::electron_charge * np.omega0);
  return np;
}

CircuitParams scale_params(const CircuitParams& p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("scale_params: a and b must be > 0");
  CircuitParams s = p;
  s.C = a * p.C;
  s.L = b * p.L;
  s.R = std::sqrt(b / a) * p.R;
  s.I_d = p.I_d / std::sqrt(b);
  s.omega_d = p.omega_d / std::sqrt(a * b);
  s.I_c = p.I_c / b;
  if (b != 1.0)
    std::cerr << "[warn] scale_params: b != 1 follows the printed I_d -> I_d/sqrt(b) rule, "
                 "which changes phi_d by sqrt(b); dimensionless drive is not invariant\n";
  return s;
}

double squid_drive_flux(const NormalizedParams& np, double tau) {
  return np.phi_x + np.phi_d * std::sin(np.omega * tau);
}

double flux_quadrature_unit(const NormalizedParams& np) { return 2.0 * constants::pi / np.Omega; }

namespace {

// Static per-ring part at frame offset xf:
// p^2/2 + x^2/2 - k cos(Omega (x + xf)) + (zeta/2)(px + xp).
Matrix squid_mode_static(const NormalizedParams& np, const FockSpace& space, double xf) {
  auto [x, p] = hilbert::quadratures(space);
  const double Om = np.Omega;
  Operator cos_op = hilbert::hermitian_function(
      x, [Om, xf](double v) { return std::cos(Om * (v + xf)); });
  Matrix h = 0.5 * (p.entries * p.entries) + 0.5 * (x.entries * x.entries) -
             np.cos_prefactor * cos_op.entries +
             0.5 * np.zeta * (p.entries * x.entries + x.entries * p.entries);
  return h;
}

// Drive flux in frame quadrature units.
double squid_drive_center(const NormalizedParams& np, double tau, double xf) {
  return flux_quadrature_unit(np) * squid_drive_flux(np, tau) - xf;
}

Matrix duffing_mode_static(const DuffingParams& dp, const FockSpace& space) {
  auto [q, p] = hilbert::quadratures(space);
  const Matrix q2 = q.entries * q.entries;
  return 0.5 * (p.entries * p.entries) + 0.25 * dp.beta * dp.beta * (q2 * q2) - 0.5 * q2 +
         0.5 * dp.Gamma * (q.entries * p.entries + p.entries * q.entries);
}

void check_two_identical(const std::vector<FockSpace>& spaces, const char* what) {
  if (spaces.size() != 2) throw InvalidDimensionError(std::string(what) + ": exactly two spaces required");
  if (spaces[0].dim != spaces[1].dim)
    throw InvalidDimensionError(std::string(what) + ": the two rings must share one dimension");
}

} // namespace

Operator build_squid_hamiltonian(const NormalizedParams& np, double tau, const FockSpace& space,
                                 double frame_offset) {
  auto [x, p] = hilbert::quadratures(space);
  const double xr = squid_drive_center(np, tau, frame_offset);
  Matrix h = squid_mode_static(np, space, frame_offset);
  h -= xr * x.entries;
  h += (0.5 * xr * xr) * Matrix::Identity(space.dim, space.dim);
  return Operator({space.dim}, std::move(h));
}

Operator build_coupled_squid_hamiltonian(const NormalizedParams& np, double tau,
                                         const std::vector<FockSpace>& spaces, double mu,
                                         double frame_offset) {
  check_two_identical(spaces, "build_coupled_squid_hamiltonian");
  const std::vector<int> dims = {spaces[0].dim, spaces[1].dim};
  const Operator h1 = build_squid_hamiltonian(np, tau, spaces[0], frame_offset);
  auto [x, p] = hilbert::quadratures(spaces[0]);
  Operator total = hilbert::embed(h1, 0, dims) + hilbert::embed(h1, 1, dims) +
                   mu * (hilbert::embed(x, 0, dims) * hilbert::embed(x, 1, dims));
  if (frame_offset != 0.0 && mu != 0.0) {
    const Operator xsum = hilbert::embed(x, 0, dims) + hilbert::embed(x, 1, dims);
    total = total + (mu * frame_offset) * xsum +
            (mu * frame_offset * frame_offset) * hilbert::identity(dims);
  }
  return total;
}

Operator build_duffing_hamiltonian(const DuffingParams& dp, double t, const FockSpace& space) {
  dp.validate();
  auto [q, p] = hilbert::quadratures(space);
  Matrix h = duffing_mode_static(dp, space);
  h += (dp.g / dp.beta) * std::cos(t) * q.entries;
  return Operator({space.dim}, std::move(h));
}

Operator build_coupled_duffing(const DuffingParams& dp, double t, const std::vector<FockSpace>& spaces) {
  check_two_identical(spaces, "build_coupled_duffing");
  const std::vector<int> dims = {spaces[0].dim, spaces[1].dim};
  const Operator h1 = build_duffing_hamiltonian(dp, t, spaces[0]);
  auto [q, p] = hilbert::quadratures(spaces[0]);
  return hilbert::embed(h1, 0, dims) + hilbert::embed(h1, 1, dims) +
         dp.mu * (hilbert::embed(q, 0, dims) * hilbert::embed(q, 1, dims));
}

std::vector<Operator> lindblad_set(double rate, const std::vector<int>& dims) {
  if (rate < 0.0) throw ConfigError("lindblad_set: damping rate must be >= 0");
  std::vector<Operator> ls;
  ls.reserve(dims.size());
  const double s = std::sqrt(2.0 * rate);
  for (size_t slot = 0; slot < dims.size(); ++slot) {
    const Operator a = hilbert::annihilation(FockSpace(dims[slot]));
    ls.push_back(s * hilbert::embed(a, static_cast<int>(slot), dims));
  }
  return ls;
}

CoupledModel make_squid_model(const NormalizedParams& np, int fock_dim, double mu,
                              double frame_offset) {
  const FockSpace space(fock_dim);
  auto [x, p] = hilbert::quadratures(space);
  CoupledModel m;
  m.n = fock_dim;
  m.h_mode = squid_mode_static(np, space, frame_offset);
  if (mu != 0.0 && frame_offset != 0.0) m.h_mode += (mu * frame_offset) * x.entries;
  m.h_band = -1; // cos term is dense
  m.x_mode = x.entries;
  m.p_mode = p.entries;
  m.a_mode = hilbert::annihilation(space).entries;
  m.mu = mu;
  m.lindblad_rate = np.zeta;
  m.drive_period = 2.0 * constants::pi / np.omega;
  const NormalizedParams np_copy = np;
  const double xf = frame_offset;
  m.drive_coeff = [np_copy, xf](double tau) { return -squid_drive_center(np_copy, tau, xf); };
  const double mu_c = mu;
  m.scalar_coeff = [np_copy, xf, mu_c](double tau) {
    const double xr = squid_drive_center(np_copy, tau, xf);
    return xr * xr + mu_c * xf * xf;
  };
  m.frame_offset = frame_offset;
  m.x_unit = flux_quadrature_unit(np);
  m.init_center = squid_drive_center(np, 0.0, frame_offset);
  m.label = "squid";
  return m;
}

CoupledModel make_duffing_model(const DuffingParams& dp, int fock_dim) {
  dp.validate();
  const FockSpace space(fock_dim);
  auto [q, p] = hilbert::quadratures(space);
  CoupledModel m;
  m.n = fock_dim;
  m.h_mode = duffing_mode_static(dp, space);
  m.h_band = 4; // q^4 sets the half-bandwidth
  m.x_mode = q.entries;
  m.p_mode = p.entries;
  m.a_mode = hilbert::annihilation(space).entries;
  m.mu = dp.mu;
  m.lindblad_rate = dp.Gamma;
  m.drive_period = 2.0 * constants::pi;
  const double amp = dp.g / dp.beta;
  m.drive_coeff = [amp](double t) { return amp * std::cos(t); };
  m.scalar_coeff = [](double) { return 0.0; };
  m.frame_offset = 0.0;
  m.x_unit = 1.0;
  m.init_center = 0.0;
  m.label = "duffing";
  return m;
}

} // namespace qsdsim::model
