#include "qsdsim/rsj.hpp"

#include <algorithm>
#include <cmath>

#include "qsdsim/constants.hpp"
#include "qsdsim/errors.hpp"

namespace qsdsim::rsj {

namespace {
constexpr double kTwoPi = 2.0 * constants::pi;

inline double restoring(double phi, const model::NormalizedParams& np) {
  return phi + np.beta_squid / kTwoPi * std::sin(kTwoPi * (phi + np.phi_x));
}

inline void rhs(double tau, double phi, double phi_dot, const model::NormalizedParams& np,
                double& dphi, double& dphi_dot) {
  dphi = phi_dot;
  dphi_dot = np.phi_d * std::sin(np.omega * tau) - 2.0 * np.zeta * phi_dot - restoring(phi, np);
}

inline void check_finite(double phi, double phi_dot, double tau) {
  if (!std::isfinite(phi) || !std::isfinite(phi_dot))
    throw NumericalError("RSJ integration diverged at tau = " + std::to_string(tau));
}
} // namespace

RsjRhs rsj_rhs(const RsjState& s, const model::NormalizedParams& np) {
  RsjRhs out{};
  rhs(s.tau, s.phi, s.phi_dot, np, out.dphi, out.dphi_dot);
  return out;
}

std::vector<RsjState> integrate_rsj(const RsjState& initial, const model::NormalizedParams& np,
                                    double dt, double t_total, int stride) {
  if (!(dt > 0.0)) throw ConfigError("integrate_rsj: dt must be > 0");
  if (stride < 1) throw ConfigError("integrate_rsj: stride must be >= 1");
  const long long n_steps = static_cast<long long>(std::llround(t_total / dt));
  std::vector<RsjState> out;
  out.reserve(static_cast<size_t>(n_steps / stride + 2));
  double phi = initial.phi, v = initial.phi_dot;
  out.push_back({phi, v, initial.tau});
  double k1p, k1v, k2p, k2v, k3p, k3v, k4p, k4v;
  for (long long k = 0; k < n_steps; ++k) {
    const double tau = initial.tau + double(k) * dt;
    rhs(tau, phi, v, np, k1p, k1v);
    rhs(tau + 0.5 * dt, phi + 0.5 * dt * k1p, v + 0.5 * dt * k1v, np, k2p, k2v);
    rhs(tau + 0.5 * dt, phi + 0.5 * dt * k2p, v + 0.5 * dt * k2v, np, k3p, k3v);
    rhs(tau + dt, phi + dt * k3p, v + dt * k3v, np, k4p, k4v);
    phi += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    check_finite(phi, v, tau + dt);
    if ((k + 1) % stride == 0 || k + 1 == n_steps)
      out.push_back({phi, v, initial.tau + double(k + 1) * dt});
  }
  return out;
}

std::vector<RsjState> integrate_rsj_adaptive(const RsjState& initial,
                                             const model::NormalizedParams& np,
                                             const std::vector<double>& times, double tol) {
  // Dormand-Prince 5(4) coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<RsjState> out;
  out.reserve(times.size());
  double tau = initial.tau, phi = initial.phi, v = initial.phi_dot;
  double h = 1e-3;
  for (double target : times) {
    if (target < tau) throw ConfigError("integrate_rsj_adaptive: times must be ascending");
    while (tau < target) {
      h = std::min(h, target - tau);
      double k1p, k1v, k2p, k2v, k3p, k3v, k4p, k4v, k5p, k5v, k6p, k6v, k7p, k7v;
      rhs(tau, phi, v, np, k1p, k1v);
      rhs(tau + c2 * h, phi + h * a21 * k1p, v + h * a21 * k1v, np, k2p, k2v);
      rhs(tau + c3 * h, phi + h * (a31 * k1p + a32 * k2p), v + h * (a31 * k1v + a32 * k2v), np, k3p,
          k3v);
      rhs(tau + c4 * h, phi + h * (a41 * k1p + a42 * k2p + a43 * k3p),
          v + h * (a41 * k1v + a42 * k2v + a43 * k3v), np, k4p, k4v);
      rhs(tau + c5 * h, phi + h * (a51 * k1p + a52 * k2p + a53 * k3p + a54 * k4p),
          v + h * (a51 * k1v + a52 * k2v + a53 * k3v + a54 * k4v), np, k5p, k5v);
      rhs(tau + h, phi + h * (a61 * k1p + a62 * k2p + a63 * k3p + a64 * k4p + a65 * k5p),
          v + h * (a61 * k1v + a62 * k2v + a63 * k3v + a64 * k4v + a65 * k5v), np, k6p, k6v);
      const double phi5 = phi + h * (b1 * k1p + b3 * k3p + b4 * k4p + b5 * k5p + b6 * k6p);
      const double v5 = v + h * (b1 * k1v + b3 * k3v + b4 * k4v + b5 * k5v + b6 * k6v);
      rhs(tau + h, phi5, v5, np, k7p, k7v);
      const double errp = h * (e1 * k1p + e3 * k3p + e4 * k4p + e5 * k5p + e6 * k6p + e7 * k7p);
      const double errv = h * (e1 * k1v + e3 * k3v + e4 * k4v + e5 * k5v + e6 * k6v + e7 * k7v);
      const double scale_p = tol + tol * std::max(std::abs(phi), std::abs(phi5));
      const double scale_v = tol + tol * std::max(std::abs(v), std::abs(v5));
      const double err = std::sqrt(0.5 * ((errp / scale_p) * (errp / scale_p) +
                                          (errv / scale_v) * (errv / scale_v)));
      if (err <= 1.0) {
        tau += h;
        phi = phi5;
        v = v5;
        check_finite(phi, v, tau);
      }
      const double factor = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
      h = std::max(h * factor, 1e-12);
    }
    out.push_back({phi, v, tau});
  }
  return out;
}

double energy(const RsjState& s, const model::NormalizedParams& np) {
  return 0.5 * s.phi_dot * s.phi_dot + 0.5 * s.phi * s.phi -
         np.beta_squid / (4.0 * constants::pi * constants::pi) *
             std::cos(kTwoPi * (s.phi + np.phi_x));
}

std::vector<double> equilibrium_roots(const model::NormalizedParams& np, bool stable_only) {
  std::vector<double> roots;
  const int n_cells = 4000;
  const double lo = -2.0, hi = 2.0;
  double prev_x = lo, prev_f = restoring(lo, np);
  for (int i = 1; i <= n_cells; ++i) {
    const double x = lo + (hi - lo) * double(i) / n_cells;
    const double f = restoring(x, np);
    if (prev_f == 0.0) roots.push_back(prev_x);
    if (prev_f * f < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = restoring(m, np);
        if (fa * fm <= 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = f;
  }
  if (stable_only) {
    std::vector<double> stable;
    for (double r : roots)
      if (1.0 + np.beta_squid * std::cos(kTwoPi * (r + np.phi_x)) > 0.0) stable.push_back(r);
    return stable;
  }
  return roots;
}

} // namespace qsdsim::rsj
