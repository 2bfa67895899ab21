// Truncated-Fock-space linear algebra: operator construction, tensor
// products, matrix functions of Hermitian operators, states, expectations.
//
// Composite indexing convention: slot 0 is the slowest-varying index, i.e.
// the flat index of a two-factor basis state |m> (x) |k> with dims [d0, d1]
// is m*d1 + k. Dense storage follows Eigen's column-contiguous layout; the
// text interchange format (dump/load below) is row-major.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "qsdsim/errors.hpp"

namespace qsdsim::hilbert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// One truncated bosonic mode with `dim` retained Fock levels.
struct FockSpace {
  int dim;
  explicit FockSpace(int dim_) : dim(dim_) {
    if (dim < 2) throw InvalidDimensionError("FockSpace: dim must be >= 2, got " + std::to_string(dim_));
  }
};

// Dense operator on a (possibly composite) truncated Fock space.
// Hermiticity is not an invariant; operations that need it check it.
struct Operator {
  std::vector<int> space_dims;
  Matrix entries;

  Operator() = default;
  Operator(std::vector<int> dims, Matrix m);

  int dim() const { return static_cast<int>(entries.rows()); }
  Operator adjoint() const { return Operator(space_dims, entries.adjoint()); }
  bool is_hermitian(double tol = 1e-10) const;

  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator operator*(Complex s) const { return Operator(space_dims, entries * s); }
  friend Operator operator*(Complex s, const Operator& o) { return o * s; }
};

// Pure state on a (possibly composite) truncated Fock space.
struct StateVector {
  std::vector<int> space_dims;
  Vector amplitudes;

  StateVector() = default;
  StateVector(std::vector<int> dims, Vector v);

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

int product_dim(const std::vector<int>& dims);

// Lowering operator: a[n, n+1] = sqrt(n+1).
Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
// Number operator built directly as an exact integer diagonal.
Operator number(const FockSpace& space);
Operator identity(const FockSpace& space);
Operator identity(const std::vector<int>& dims);
// x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2).
std::pair<Operator, Operator> quadratures(const FockSpace& space);

// f applied to a Hermitian operator through its eigendecomposition.
Operator hermitian_function(const Operator& op, const std::function<double(double)>& f);

// I (x) ... (x) op (x) ... (x) I with op at position `slot`.
Operator embed(const Operator& op, int slot, const std::vector<int>& dims);

Complex expectation(const StateVector& state, const Operator& op);

StateVector normalize(const StateVector& state);

// Basis states and friends.
StateVector vacuum(const std::vector<int>& dims);
StateVector fock_state(const std::vector<int>& dims, const std::vector<int>& levels);
// Coherent state |alpha> on a single mode, alpha = (x0 + i p0)/sqrt(2).
StateVector coherent(const FockSpace& space, Complex alpha);
StateVector product(const StateVector& a, const StateVector& b);

// Population of the top `levels` Fock levels of each factor; the runtime
// truncation health monitor watches the max over factors.
std::vector<double> edge_occupancy(const StateVector& state, int levels = 2);

// Text interchange: one header line "rows cols", then row-major "re im"
// pairs. Used for debug dumps and the initial_state=file path.
void dump_matrix(std::ostream& os, const Matrix& m);
Matrix load_matrix(std::istream& is);
void dump_state(std::ostream& os, const StateVector& s);
Vector load_vector(std::istream& is);

} // namespace qsdsim::hilbert
