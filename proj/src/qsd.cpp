#include "qsdsim/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qsdsim/entangle.hpp"
#include "qsdsim/errors.hpp"

namespace qsdsim::qsd {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("IntegratorConfig: dt must be > 0");
  if (t_total < 0.0) throw ConfigError("IntegratorConfig: t_total must be >= 0");
  if (sample_stride < 1) throw ConfigError("IntegratorConfig: sample_stride must be >= 1");
  if (renormalize_every < 1) throw ConfigError("IntegratorConfig: renormalize_every must be >= 1");
}

BandedOp::BandedOp(const Matrix& m, int lo_, int up_) : n(int(m.rows())), lo(lo_), up(up_) {
  diags.reserve(lo + up + 1);
  for (int d = -lo; d <= up; ++d) {
    const int len = n - std::abs(d);
    Vector v(len);
    const int r0 = std::max(0, -d);
    for (int i = 0; i < len; ++i) v[i] = m(r0 + i, r0 + i + d);
    diags.push_back(std::move(v));
  }
}

namespace {

using MapC = Eigen::Map<const Matrix>;
using MapM = Eigen::Map<Matrix>;

// out += coeff * (A (x) I) psi, i.e. mixes the slot-0 (column) index.
void add_slot0(const BandedOp& A, Complex coeff, MapC psi, MapM out) {
  const int n = A.n;
  for (int d = -A.lo; d <= A.up; ++d) {
    const Vector& vd = A.diags[d + A.lo];
    const int r0 = std::max(0, -d);
    const int len = n - std::abs(d);
    for (int i = 0; i < len; ++i) {
      const Complex c = coeff * vd[i];
      if (c != Complex(0.0, 0.0)) out.col(r0 + i) += c * psi.col(r0 + i + d);
    }
  }
}

// out += coeff * (I (x) A) psi, i.e. mixes the slot-1 (row) index.
void add_slot1(const BandedOp& A, Complex coeff, MapC psi, MapM out) {
  const int n = A.n;
  for (int d = -A.lo; d <= A.up; ++d) {
    const Vector& vd = A.diags[d + A.lo];
    const int r0 = std::max(0, -d);
    const int len = n - std::abs(d);
    for (int m = 0; m < n; ++m)
      out.col(m).segment(r0, len) +=
          coeff * vd.cwiseProduct(psi.col(m).segment(r0 + d, len));
  }
}

} // namespace

TwoModeSystem::TwoModeSystem(const model::CoupledModel& m)
    : m_(&m),
      n_(m.n),
      h_dense_(m.h_band < 0),
      x_(m.x_mode, 1, 1),
      p_(m.p_mode, 1, 1),
      a_(m.a_mode, 0, 1),
      adag_(Matrix(m.a_mode.adjoint()), 1, 0),
      l_scale_(std::sqrt(2.0 * m.lindblad_rate)),
      scratch_(m.n, m.n),
      vec_scratch_(m.n * m.n) {
  if (!h_dense_) h_banded_ = BandedOp(m.h_mode, m.h_band, m.h_band);
}

void TwoModeSystem::apply_h(double tau, const Vector& in, Vector& out) const {
  out.setZero();
  MapC pin(in.data(), n_, n_);
  MapM pout(out.data(), n_, n_);
  // static per-mode part on both slots
  if (h_dense_) {
    pout.noalias() += m_->h_mode * pin;
    pout.noalias() += pin * m_->h_mode.transpose();
  } else {
    add_slot1(h_banded_, 1.0, pin, pout);
    add_slot0(h_banded_, 1.0, pin, pout);
  }
  // coupling mu * x (x) x
  if (m_->mu != 0.0) {
    scratch_.setZero();
    MapM ps(scratch_.data(), n_, n_);
    add_slot1(x_, 1.0, pin, ps);
    add_slot0(x_, m_->mu, MapC(scratch_.data(), n_, n_), pout);
  }
  // drive c(tau) (x0 + x1)
  const double c = m_->drive_coeff(tau);
  if (c != 0.0) {
    add_slot0(x_, c, pin, pout);
    add_slot1(x_, c, pin, pout);
  }
  const double s = m_->scalar_coeff(tau);
  if (s != 0.0) out += s * in;
}

void TwoModeSystem::apply_l(int j, const Vector& in, Vector& out) const {
  out.setZero();
  MapC pin(in.data(), n_, n_);
  MapM pout(out.data(), n_, n_);
  if (j == 0)
    add_slot0(a_, l_scale_, pin, pout);
  else
    add_slot1(a_, l_scale_, pin, pout);
}

void TwoModeSystem::apply_ldag(int j, const Vector& in, Vector& out) const {
  out.setZero();
  MapC pin(in.data(), n_, n_);
  MapM pout(out.data(), n_, n_);
  if (j == 0)
    add_slot0(adag_, l_scale_, pin, pout);
  else
    add_slot1(adag_, l_scale_, pin, pout);
}

Complex TwoModeSystem::expect_slot(const BandedOp& op, int slot, const Vector& psi) const {
  vec_scratch_.setZero();
  MapC pin(psi.data(), n_, n_);
  MapM pout(vec_scratch_.data(), n_, n_);
  if (slot == 0)
    add_slot0(op, 1.0, pin, pout);
  else
    add_slot1(op, 1.0, pin, pout);
  return psi.dot(vec_scratch_);
}

namespace {

struct StepWorkspace {
  Vector h1, lpsi, ldag_l, f0, f1, pred;
  std::vector<Vector> lpsi0;
  std::vector<Complex> e0;
  void resize(int d, int n_lindblads) {
    h1.resize(d);
    lpsi.resize(d);
    ldag_l.resize(d);
    f0.resize(d);
    f1.resize(d);
    pred.resize(d);
    lpsi0.assign(n_lindblads, Vector(d));
    e0.assign(n_lindblads, Complex(0.0, 0.0));
  }
};

// Deterministic drift F(psi): -i H psi plus the Lindblad drift with
// expectations taken at psi. When `keep` is set, L_j psi and <L_j> are
// stashed for the fluctuation term.
template <class System>
void eval_drift(const System& sys, double tau, const Vector& psi, Vector& out, StepWorkspace& w,
                bool keep) {
  const Complex mi(0.0, -1.0);
  sys.apply_h(tau, psi, w.h1);
  out = mi * w.h1;
  const double nrm2 = psi.squaredNorm();
  for (int j = 0; j < sys.n_lindblads(); ++j) {
    sys.apply_l(j, psi, w.lpsi);
    const Complex e = psi.dot(w.lpsi) / nrm2;
    out += std::conj(e) * w.lpsi;
    sys.apply_ldag(j, w.lpsi, w.ldag_l);
    out -= 0.5 * w.ldag_l;
    out -= (0.5 * std::norm(e)) * psi;
    if (keep) {
      w.lpsi0[j] = w.lpsi;
      w.e0[j] = e;
    }
  }
}

// Shared step kernel: Heun (explicit trapezoid) on the deterministic drift,
// strict Ito Euler on the fluctuation term (pre-step expectations). Returns
// the pre-renormalization |norm - 1|; `next` receives the advanced state.
template <class System>
double step_core(const System& sys, double tau, double dt, const Complex* dxis, const Vector& psi,
                 Vector& next, StepWorkspace& w, bool renormalize) {
  eval_drift(sys, tau, psi, w.f0, w, /*keep=*/true);
  w.pred = psi + dt * w.f0;
  eval_drift(sys, tau, w.pred, w.f1, w, /*keep=*/false);
  next = psi + (0.5 * dt) * (w.f0 + w.f1);
  for (int j = 0; j < sys.n_lindblads(); ++j) {
    next += dxis[j] * w.lpsi0[j];
    next -= (dxis[j] * w.e0[j]) * psi;
  }
  const double norm = next.norm();
  if (!(norm > 1e-8) || !std::isfinite(norm))
    throw IntegratorFailure("qsd step: norm collapsed to " + std::to_string(norm) +
                            " at tau = " + std::to_string(tau) + "; reduce dt");
  const double drift = std::abs(norm - 1.0);
  if (renormalize) next /= norm;
  return drift;
}

// Dense-operator system for the spec-level step and small oracle runs.
struct DenseSystem {
  const Matrix* H;
  std::vector<const Matrix*> Ls;
  std::vector<Matrix> Ldags;

  DenseSystem(const Operator& h, const std::vector<Operator>& ls) : H(&h.entries) {
    for (const auto& l : ls) {
      Ls.push_back(&l.entries);
      Ldags.push_back(l.entries.adjoint());
    }
  }
  int n_lindblads() const { return int(Ls.size()); }
  void apply_h(double, const Vector& in, Vector& out) const { out.noalias() = (*H) * in; }
  void apply_l(int j, const Vector& in, Vector& out) const { out.noalias() = (*Ls[j]) * in; }
  void apply_ldag(int j, const Vector& in, Vector& out) const { out.noalias() = Ldags[j] * in; }
};

} // namespace

StateVector qsd_step(const StateVector& state, const Operator& H, const std::vector<Operator>& Ls,
                     double dt, const std::vector<Complex>& dxis, double* norm_drift,
                     bool renormalize) {
  if (state.dim() != H.dim())
    throw DimensionMismatchError("qsd_step: state dim " + std::to_string(state.dim()) +
                                 " vs H dim " + std::to_string(H.dim()));
  for (const auto& l : Ls)
    if (l.dim() != state.dim()) throw DimensionMismatchError("qsd_step: Lindblad dimension mismatch");
  if (dxis.size() != Ls.size())
    throw DimensionMismatchError("qsd_step: need one Wiener increment per Lindblad (" +
                                 std::to_string(Ls.size()) + " needed, " +
                                 std::to_string(dxis.size()) + " given)");
  DenseSystem sys(H, Ls);
  StepWorkspace w;
  w.resize(state.dim(), int(Ls.size()));
  Vector next(state.dim());
  const double drift = step_core(sys, 0.0, dt, dxis.data(), state.amplitudes, next, w, renormalize);
  if (norm_drift) *norm_drift = drift;
  return StateVector(state.space_dims, std::move(next));
}

TrajectoryRecord run_trajectory(const model::CoupledModel& m, const IntegratorConfig& cfg,
                                noise::NoiseStream stream, const StateVector& initial,
                                const HealthThresholds& health) {
  cfg.validate();
  if (initial.space_dims != m.dims())
    throw DimensionMismatchError("run_trajectory: initial state dims do not match the model");
  TwoModeSystem sys(m);
  const long long n_steps = std::llround(cfg.t_total / cfg.dt);
  const long long n_samples = n_steps / cfg.sample_stride + 1;

  TrajectoryRecord rec;
  rec.metadata.seed = stream.seed();
  rec.metadata.trajectory_index = stream.trajectory_index();
  rec.metadata.fock_dim = m.n;
  rec.metadata.model_label = m.label;
  rec.metadata.dt = cfg.dt;
  rec.metadata.x_unit = m.x_unit;
  rec.metadata.frame_offset = m.frame_offset;
  for (auto* v : {&rec.times, &rec.exp_x1, &rec.exp_p1, &rec.exp_x2, &rec.exp_p2, &rec.entropy,
                  &rec.norm_drift, &rec.truncation_occupancy})
    v->reserve(size_t(n_samples) + 1);

  Vector psi = hilbert::normalize(initial).amplitudes;
  Vector next(psi.size());
  StepWorkspace w;
  w.resize(int(psi.size()), 2);
  Complex dxis[2];
  double window_drift = 0.0;

  auto sample = [&](long long k) {
    const double tau = double(k) * cfg.dt;
    rec.times.push_back(tau);
    const double x1 = std::real(sys.expect_slot(sys.x_op(), 0, psi));
    const double p1 = std::real(sys.expect_slot(sys.p_op(), 0, psi));
    const double x2 = std::real(sys.expect_slot(sys.x_op(), 1, psi));
    const double p2 = std::real(sys.expect_slot(sys.p_op(), 1, psi));
    rec.exp_x1.push_back((x1 + m.frame_offset) / m.x_unit);
    rec.exp_p1.push_back(p1 / m.x_unit);
    rec.exp_x2.push_back((x2 + m.frame_offset) / m.x_unit);
    rec.exp_p2.push_back(p2 / m.x_unit);
    StateVector sv(m.dims(), psi);
    rec.entropy.push_back(entangle::entanglement_entropy(sv));
    const auto occ = hilbert::edge_occupancy(sv);
    const double occ_max = *std::max_element(occ.begin(), occ.end());
    rec.truncation_occupancy.push_back(occ_max);
    rec.norm_drift.push_back(window_drift);
    window_drift = 0.0;
    rec.metadata.max_occupancy = std::max(rec.metadata.max_occupancy, occ_max);
    if (occ_max > health.abort)
      throw TruncationError("truncation health: top-level occupancy " + std::to_string(occ_max) +
                            " exceeded abort threshold " + std::to_string(health.abort) +
                            " at tau = " + std::to_string(tau) + " (fock_dim " +
                            std::to_string(m.n) + " too small)");
    if (occ_max > health.warn) ++rec.metadata.health_warnings;
  };

  for (long long k = 0; k <= n_steps; ++k) {
    if (k % cfg.sample_stride == 0 || k == n_steps) sample(k);
    if (k == n_steps) break;
    const double tau = double(k) * cfg.dt;
    dxis[0] = stream.complex_wiener(cfg.dt);
    dxis[1] = stream.complex_wiener(cfg.dt);
    const bool renorm = ((k + 1) % cfg.renormalize_every) == 0;
    const double drift = step_core(sys, tau, cfg.dt, dxis, psi, next, w, renorm);
    window_drift = std::max(window_drift, drift);
    psi.swap(next);
  }
  return rec;
}

StateVector default_initial_state(const model::CoupledModel& m, const std::string& kind,
                                  const std::string& file_path) {
  const hilbert::FockSpace space(m.n);
  if (kind == "vacuum") {
    return hilbert::vacuum(m.dims());
  } else if (kind == "displaced_vacuum") {
    const Complex alpha(m.init_center / std::sqrt(2.0), 0.0);
    const StateVector one = hilbert::coherent(space, alpha);
    return hilbert::product(one, one);
  } else if (kind == "file") {
    std::ifstream is(file_path);
    if (!is) throw ConfigError("initial_state=file: cannot open '" + file_path + "'");
    Vector v = hilbert::load_vector(is);
    if (v.size() != m.n * m.n)
      throw ConfigError("initial_state=file: state length " + std::to_string(v.size()) +
                        " does not match fock_dim^2 = " + std::to_string(m.n * m.n));
    return hilbert::normalize(StateVector(m.dims(), std::move(v)));
  }
  throw ConfigError("unknown initial_state '" + kind + "'");
}

} // namespace qsdsim::qsd
