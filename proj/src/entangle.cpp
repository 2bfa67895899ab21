#include "qsdsim/entangle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qsdsim::entangle {

DensityMatrix partial_trace(const StateVector& state, int keep) {
  if (state.space_dims.size() != 2)
    throw InvalidDimensionError("partial_trace: state must have exactly 2 factors, has " +
                                std::to_string(state.space_dims.size()));
  if (keep != 0 && keep != 1)
    throw InvalidDimensionError("partial_trace: keep must be 0 or 1");
  const int d0 = state.space_dims[0];
  const int d1 = state.space_dims[1];
  // Flat index m*d1 + k. Column-major map of the amplitude buffer gives the
  // d1 x d0 matrix Psi with Psi(k, m) = psi[m, k].
  Eigen::Map<const Matrix> psi(state.amplitudes.data(), d1, d0);
  DensityMatrix rho;
  if (keep == 0) {
    rho.dim = d0;
    rho.entries = psi.transpose() * psi.conjugate(); // rho0[m,n] = sum_k psi[m,k] conj(psi[n,k])
  } else {
    rho.dim = d1;
    rho.entries = psi * psi.adjoint(); // rho1[k,l] = sum_m psi[m,k] conj(psi[m,l])
  }
  return rho;
}

double von_neumann_entropy(const DensityMatrix& rho, ClampAudit* audit) {
  if (rho.dim <= 0 || rho.entries.rows() != rho.dim || rho.entries.cols() != rho.dim)
    throw InvalidDensityMatrixError("von_neumann_entropy: malformed density matrix");
  const double herm_dev = (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10)
    throw InvalidDensityMatrixError("von_neumann_entropy: Hermiticity deviation " + std::to_string(herm_dev));
  const double trace_dev = std::abs(rho.entries.trace().real() - 1.0) + std::abs(rho.entries.trace().imag());
  if (trace_dev > 1e-10)
    throw InvalidDensityMatrixError("von_neumann_entropy: trace deviates from 1 by " + std::to_string(trace_dev));

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("von_neumann_entropy: eigendecomposition failed");
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    double lam = es.eigenvalues()[k];
    if (lam < -1e-10)
      throw InvalidDensityMatrixError("von_neumann_entropy: eigenvalue " + std::to_string(lam) +
                                      " below -1e-10");
    double clamped = lam;
    if (clamped < 0.0) clamped = 0.0;
    if (clamped > 1.0) clamped = 1.0;
    if (audit) audit->record(std::abs(clamped - lam));
    if (clamped > 0.0) s -= clamped * std::log(clamped);
  }
  return s;
}

double entanglement_entropy(const StateVector& state, ClampAudit* audit) {
  const int d0 = state.space_dims.at(0);
  const int d1 = state.space_dims.size() == 2 ? state.space_dims.at(1) : 0;
  // Trace out the larger factor: the eigenproblem is cheaper on the smaller one.
  const int keep = (d1 > 0 && d1 < d0) ? 1 : 0;
  return von_neumann_entropy(partial_trace(state, keep), audit);
}

} // namespace qsdsim::entangle
