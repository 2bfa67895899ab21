// Physical parameter handling (circuit constants, dimensionless forms, a/b
// scaling) and construction of the SQUID-ring and Duffing Hamiltonians and
// their Lindblad operators.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsdsim/hilbert.hpp"

namespace qsdsim::model {

using hilbert::FockSpace;
using hilbert::Matrix;
using hilbert::Operator;

// Physical SQUID circuit constants (SI units).
struct CircuitParams {
  double C;        // farads
  double L;        // henries
  double R;        // ohms
  double I_c;      // amperes, weak-link critical current
  double I_d;      // amperes, drive amplitude
  double omega_d;  // rad/s, drive frequency
  double Phi_x_dc; // webers, static external flux bias

  void validate() const;
};

// Dimensionless groups derived from CircuitParams.
struct NormalizedParams {
  double omega0;        // 1/sqrt(LC), rad/s
  double beta_squid;    // 2 pi L I_c / Phi0
  double zeta;          // 1/(2 omega0 R C)
  double phi_d;         // I_d L / Phi0
  double omega;         // omega_d / omega0
  double phi_x;         // Phi_x_dc / Phi0
  double Omega;         // [(4 e^2/hbar) sqrt(L/C)]^(1/2)
  double cos_prefactor; // I_c / (2 e omega0)
};

struct DuffingParams {
  double beta;          // hbar-scaling parameter
  double g = 0.3;       // drive amplitude
  double Gamma = 0.125; // damping
  double mu = 0.2;      // coupling

  void validate() const;
};

// Baseline circuit of the SQUID study: C=1e-13 F, L=3e-10 H, R=100 ohm,
// I_d=0.9 uA, Phi_x=0.5 Phi0, omega_d=omega0, I_c fixed by beta_squid=2.
CircuitParams baseline_circuit();

// Critical current that realizes a given beta_squid at inductance L.
double critical_current_for_beta(double beta_squid, double L);

NormalizedParams derive_dimensionless(const CircuitParams& p);

// C -> aC, L -> bL, R -> sqrt(b/a) R, I_d -> I_d/sqrt(b),
// omega_d -> omega_d/sqrt(ab), I_c -> I_c/b. For b != 1 the printed I_d rule
// does not preserve phi_d; a warning is emitted on stderr.
CircuitParams scale_params(const CircuitParams& p, double a, double b);

// phi_x(tau) = phi_x + phi_d sin(omega tau), in flux-quantum units.
double squid_drive_flux(const NormalizedParams& np, double tau);

// Conversion between flux in Phi0 units and the dimensionless quadrature:
// x = sqrt(C omega0 / hbar) Phi0 * phi. Equal to 2 pi / Omega.
double flux_quadrature_unit(const NormalizedParams& np);

// Single-ring H' = p^2/2 + (x - x(tau))^2/2 - cos_prefactor cos(Omega x)
//                + (zeta/2)(px + xp), with x(tau) the drive flux in
// quadrature units. `frame_offset` shifts the computational basis by a
// static displacement along x; observables must add it back.
Operator build_squid_hamiltonian(const NormalizedParams& np, double tau, const FockSpace& space,
                                 double frame_offset = 0.0);

// embed(H'_1, 0) + embed(H'_2, 1) + mu x1 x2, both rings sharing one drive.
// With a nonzero frame offset the coupling picks up the exact cross terms
// mu frame (x1 + x2) + mu frame^2.
Operator build_coupled_squid_hamiltonian(const NormalizedParams& np, double tau,
                                         const std::vector<FockSpace>& spaces, double mu,
                                         double frame_offset = 0.0);

// H_i = p^2/2 + (beta^2/4) q^4 - q^2/2 + (g/beta) cos(t) q + (Gamma/2)(qp+pq).
Operator build_duffing_hamiltonian(const DuffingParams& dp, double t, const FockSpace& space);

// H_1 + H_2 + mu q1 q2.
Operator build_coupled_duffing(const DuffingParams& dp, double t, const std::vector<FockSpace>& spaces);

// One Lindblad per factor: sqrt(2 rate) a_j (rate = zeta or Gamma).
std::vector<Operator> lindblad_set(double rate, const std::vector<int>& dims);

// Precomputed operator parts for the two-mode trajectory engine. The full
// Hamiltonian at time tau is
//   embed(h_mode,0) + embed(h_mode,1) + mu x (x) x
//   + drive_coeff(tau) (x0 + x1) + scalar_coeff(tau) I,
// with Lindblads sqrt(2 lindblad_rate) a_j. Immutable and shareable across
// trajectory workers.
struct CoupledModel {
  int n = 0;
  Matrix h_mode;                // static per-mode part
  int h_band = -1;              // half-bandwidth of h_mode, -1 = dense
  Matrix x_mode;                // quadrature (band 1)
  Matrix p_mode;                // conjugate quadrature (band 1), observables only
  Matrix a_mode;                // annihilation
  double mu = 0.0;
  double lindblad_rate = 0.0;
  double drive_period = 0.0;    // in dimensionless time
  std::function<double(double)> drive_coeff;
  std::function<double(double)> scalar_coeff;
  double frame_offset = 0.0;    // quadrature units
  double x_unit = 1.0;          // reported x = (<x> + frame_offset)/x_unit
  double init_center = 0.0;     // tau=0 drive center in frame coordinates
  std::string label;

  std::vector<int> dims() const { return {n, n}; }
};

CoupledModel make_squid_model(const NormalizedParams& np, int fock_dim, double mu,
                              double frame_offset);
CoupledModel make_duffing_model(const DuffingParams& dp, int fock_dim);

} // namespace qsdsim::model
