#include "qsdsim/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qsdsim::hilbert {

namespace {
std::string dims_str(const std::vector<int>& dims) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << "]";
  return os.str();
}
} // namespace

int product_dim(const std::vector<int>& dims) {
  if (dims.empty()) throw InvalidDimensionError("empty dimension list");
  long long p = 1;
  for (int d : dims) {
    if (d < 2) throw InvalidDimensionError("factor dimension must be >= 2, got " + std::to_string(d));
    p *= d;
    if (p > (1 << 24)) throw InvalidDimensionError("composite dimension too large");
  }
  return static_cast<int>(p);
}

Operator::Operator(std::vector<int> dims, Matrix m) : space_dims(std::move(dims)), entries(std::move(m)) {
  const int d = product_dim(space_dims);
  if (entries.rows() != entries.cols() || entries.rows() != d)
    throw InvalidDimensionError("Operator: matrix is " + std::to_string(entries.rows()) + "x" +
                                std::to_string(entries.cols()) + " but dims " + dims_str(space_dims) +
                                " require " + std::to_string(d));
}

bool Operator::is_hermitian(double tol) const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {
void check_same_dims(const std::vector<int>& a, const std::vector<int>& b, const char* what) {
  if (a != b)
    throw DimensionMismatchError(std::string(what) + ": dims " + dims_str(a) + " vs " + dims_str(b));
}
} // namespace

Operator Operator::operator+(const Operator& o) const {
  check_same_dims(space_dims, o.space_dims, "operator+");
  return Operator(space_dims, entries + o.entries);
}
Operator Operator::operator-(const Operator& o) const {
  check_same_dims(space_dims, o.space_dims, "operator-");
  return Operator(space_dims, entries - o.entries);
}
Operator Operator::operator*(const Operator& o) const {
  check_same_dims(space_dims, o.space_dims, "operator*");
  return Operator(space_dims, entries * o.entries);
}

StateVector::StateVector(std::vector<int> dims, Vector v) : space_dims(std::move(dims)), amplitudes(std::move(v)) {
  const int d = product_dim(space_dims);
  if (amplitudes.size() != d)
    throw InvalidDimensionError("StateVector: length " + std::to_string(amplitudes.size()) + " but dims " +
                                dims_str(space_dims) + " require " + std::to_string(d));
}

Operator annihilation(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n + 1 < space.dim; ++n) m(n, n + 1) = std::sqrt(double(n + 1));
  return Operator({space.dim}, std::move(m));
}

Operator creation(const FockSpace& space) { return annihilation(space).adjoint(); }

Operator number(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) m(n, n) = double(n);
  return Operator({space.dim}, std::move(m));
}

Operator identity(const FockSpace& space) { return identity(std::vector<int>{space.dim}); }

Operator identity(const std::vector<int>& dims) {
  const int d = product_dim(dims);
  return Operator(dims, Matrix::Identity(d, d));
}

std::pair<Operator, Operator> quadratures(const FockSpace& space) {
  const Operator a = annihilation(space);
  const Operator ad = a.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  return {Operator({space.dim}, (a.entries + ad.entries) * s),
          Operator({space.dim}, i * (ad.entries - a.entries) * s)};
}

Operator hermitian_function(const Operator& op, const std::function<double(double)>& f) {
  const double dev = (op.entries - op.entries.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw HermiticityError("hermitian_function: input deviates from Hermitian by " + std::to_string(dev));
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.entries);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_function: eigendecomposition failed");
  Eigen::VectorXd fd = es.eigenvalues();
  for (Eigen::Index k = 0; k < fd.size(); ++k) fd[k] = f(fd[k]);
  Matrix out = es.eigenvectors() * fd.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(op.space_dims, std::move(out));
}

Operator embed(const Operator& op, int slot, const std::vector<int>& dims) {
  if (op.space_dims.size() != 1)
    throw InvalidDimensionError("embed: operator must act on a single factor");
  if (slot < 0 || slot >= static_cast<int>(dims.size()))
    throw InvalidDimensionError("embed: slot " + std::to_string(slot) + " out of range for " + dims_str(dims));
  if (op.dim() != dims[slot])
    throw InvalidDimensionError("embed: operator dim " + std::to_string(op.dim()) + " != dims[" +
                                std::to_string(slot) + "] = " + std::to_string(dims[slot]));
  int pre = 1, post = 1;
  for (int s = 0; s < slot; ++s) pre *= dims[s];
  for (int s = slot + 1; s < static_cast<int>(dims.size()); ++s) post *= dims[s];
  const int d = op.dim();
  const int full = pre * d * post;
  Matrix out = Matrix::Zero(full, full);
  for (int a = 0; a < pre; ++a)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const Complex v = op.entries(r, c);
        if (v == Complex(0.0, 0.0)) continue;
        const int row0 = (a * d + r) * post;
        const int col0 = (a * d + c) * post;
        for (int b = 0; b < post; ++b) out(row0 + b, col0 + b) = v;
      }
  return Operator(dims, std::move(out));
}

Complex expectation(const StateVector& state, const Operator& op) {
  if (state.space_dims != op.space_dims || state.dim() != op.dim())
    throw DimensionMismatchError("expectation: state dims " + dims_str(state.space_dims) + " vs operator " +
                                 dims_str(op.space_dims));
  return state.amplitudes.dot(op.entries * state.amplitudes);
}

StateVector normalize(const StateVector& state) {
  const double n = state.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw DegenerateStateError("normalize: state norm is " + std::to_string(n));
  return StateVector(state.space_dims, state.amplitudes / n);
}

StateVector vacuum(const std::vector<int>& dims) {
  Vector v = Vector::Zero(product_dim(dims));
  v[0] = 1.0;
  return StateVector(dims, std::move(v));
}

StateVector fock_state(const std::vector<int>& dims, const std::vector<int>& levels) {
  if (levels.size() != dims.size()) throw InvalidDimensionError("fock_state: one level per factor required");
  int idx = 0;
  for (size_t s = 0; s < dims.size(); ++s) {
    if (levels[s] < 0 || levels[s] >= dims[s])
      throw InvalidDimensionError("fock_state: level " + std::to_string(levels[s]) + " outside factor dim " +
                                  std::to_string(dims[s]));
    idx = idx * dims[s] + levels[s];
  }
  Vector v = Vector::Zero(product_dim(dims));
  v[idx] = 1.0;
  return StateVector(dims, std::move(v));
}

StateVector coherent(const FockSpace& space, Complex alpha) {
  Vector v(space.dim);
  const double r = std::abs(alpha);
  if (r == 0.0) return vacuum({space.dim});
  // Log-domain amplitudes keep large displacements finite before the final
  // renormalization over the truncated basis.
  const double theta = std::arg(alpha);
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> lg(space.dim);
  for (int n = 0; n < space.dim; ++n) {
    lg[n] = n * std::log(r) - 0.5 * std::lgamma(double(n) + 1.0);
    lmax = std::max(lmax, lg[n]);
  }
  for (int n = 0; n < space.dim; ++n)
    v[n] = std::exp(lg[n] - lmax) * Complex(std::cos(n * theta), std::sin(n * theta));
  v /= v.norm();
  return StateVector({space.dim}, std::move(v));
}

StateVector product(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.space_dims;
  dims.insert(dims.end(), b.space_dims.begin(), b.space_dims.end());
  Vector v(a.dim() * b.dim());
  for (int m = 0; m < a.dim(); ++m)
    for (int k = 0; k < b.dim(); ++k) v[m * b.dim() + k] = a.amplitudes[m] * b.amplitudes[k];
  return StateVector(dims, std::move(v));
}

std::vector<double> edge_occupancy(const StateVector& state, int levels) {
  const auto& dims = state.space_dims;
  std::vector<double> occ(dims.size(), 0.0);
  int post = state.dim();
  for (size_t s = 0; s < dims.size(); ++s) {
    post /= dims[s];
    const int pre = state.dim() / (dims[s] * post);
    double p = 0.0;
    for (int a = 0; a < pre; ++a)
      for (int n = std::max(0, dims[s] - levels); n < dims[s]; ++n) {
        const int base = (a * dims[s] + n) * post;
        for (int b = 0; b < post; ++b) p += std::norm(state.amplitudes[base + b]);
      }
    occ[s] = p;
  }
  return occ;
}

void dump_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << " " << m.cols() << "\n";
  os.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << " ";
      os << m(r, c).real() << " " << m(r, c).imag();
    }
    os << "\n";
  }
}

Matrix load_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0)
    throw NumericalError("load_matrix: bad header");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im)) throw NumericalError("load_matrix: truncated data");
      m(r, c) = Complex(re, im);
    }
  return m;
}

void dump_state(std::ostream& os, const StateVector& s) { dump_matrix(os, s.amplitudes); }

Vector load_vector(std::istream& is) {
  Matrix m = load_matrix(is);
  if (m.cols() != 1) throw NumericalError("load_vector: expected a single column");
  return m.col(0);
}

} // namespace qsdsim::hilbert
