// Partial trace of a pure two-factor state and von Neumann entropy of the
// reduced density operator.
#pragma once

#include "qsdsim/hilbert.hpp"

namespace qsdsim::entangle {

using hilbert::Complex;
using hilbert::Matrix;
using hilbert::StateVector;

struct DensityMatrix {
  int dim = 0;
  Matrix entries;
};

// Reduce a two-factor pure state onto factor `keep` (0 or 1).
DensityMatrix partial_trace(const StateVector& state, int keep);

// Counters for the eigenvalue clamping applied inside the entropy. Tiny
// negative eigenvalues from roundoff are clamped to [0, 1]; clamps larger
// than 1e-8 are tallied so truncation artifacts stay visible.
struct ClampAudit {
  long long clamps = 0;
  double worst = 0.0;
  void record(double magnitude) {
    if (magnitude > 1e-8) ++clamps;
    if (magnitude > worst) worst = magnitude;
  }
};

// S = -sum_k lambda_k ln(lambda_k), natural log, 0 ln 0 := 0.
// Validates the DensityMatrix invariants (Hermitian to 1e-10, unit trace to
// 1e-10, eigenvalues >= -1e-10) before clamping.
double von_neumann_entropy(const DensityMatrix& rho, ClampAudit* audit = nullptr);

// Entropy of entanglement of a pure two-factor state across the bipartition.
double entanglement_entropy(const StateVector& state, ClampAudit* audit = nullptr);

} // namespace qsdsim::entangle
