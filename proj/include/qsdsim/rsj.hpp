// Classical resistively-shunted-junction dynamics of a single driven SQUID
// ring, in the dimensionless form
//   phi'' + 2 zeta phi' + phi + (beta/2pi) sin[2pi(phi + phi_x)] = phi_d sin(omega tau).
#pragma once

#include <vector>

#include "qsdsim/model.hpp"

namespace qsdsim::rsj {

struct RsjState {
  double phi = 0.0;
  double phi_dot = 0.0;
  double tau = 0.0;
};

struct RsjRhs {
  double dphi;
  double dphi_dot;
};

RsjRhs rsj_rhs(const RsjState& s, const model::NormalizedParams& np);

// Fixed-step RK4; returns states sampled every `stride` steps, first entry
// the initial state. Throws NumericalError on non-finite state.
std::vector<RsjState> integrate_rsj(const RsjState& initial, const model::NormalizedParams& np,
                                    double dt, double t_total, int stride = 1);

// Adaptive Dormand-Prince 5(4) cross-check oracle: states at the requested
// times (ascending), local tolerance `tol` (abs and rel).
std::vector<RsjState> integrate_rsj_adaptive(const RsjState& initial,
                                             const model::NormalizedParams& np,
                                             const std::vector<double>& times, double tol = 1e-10);

// E = phi_dot^2/2 + phi^2/2 - (beta/4pi^2) cos[2pi(phi + phi_x)];
// along undriven trajectories dE/dtau = -2 zeta phi_dot^2.
double energy(const RsjState& s, const model::NormalizedParams& np);

// Roots of phi + (beta/2pi) sin[2pi(phi + phi_x)] = 0 in [-2, 2], by scan +
// bisection. `stable_only` keeps roots with 1 + beta cos[2pi(phi+phi_x)] > 0.
std::vector<double> equilibrium_roots(const model::NormalizedParams& np, bool stable_only = false);

} // namespace qsdsim::rsj
