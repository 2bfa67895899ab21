#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qsdsim/hilbert.hpp"

using namespace qsdsim;
using namespace qsdsim::hilbert;
using Complex = std::complex<double>;

namespace {
Matrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return 0.5 * (m + Matrix(m.adjoint()));
}

StateVector random_state(const std::vector<int>& dims, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector v(product_dim(dims));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return normalize(StateVector(dims, v));
}
} // namespace

TEST_CASE("annihilation operator entries") {
  const Operator a2 = annihilation(FockSpace(2));
  CHECK(a2.entries(0, 1) == Complex(1.0, 0.0));
  CHECK(a2.entries(0, 0) == Complex(0.0, 0.0));
  CHECK(a2.entries(1, 0) == Complex(0.0, 0.0));
  CHECK(a2.entries(1, 1) == Complex(0.0, 0.0));

  const Operator a3 = annihilation(FockSpace(3));
  CHECK(std::abs(a3.entries(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(a3.entries(1, 2) - std::sqrt(2.0)) < 1e-15);
  int nonzeros = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (a3.entries(r, c) != Complex(0.0, 0.0)) ++nonzeros;
  CHECK(nonzeros == 2);

  // a |0> = 0
  const StateVector vac = vacuum({4});
  const Operator a4 = annihilation(FockSpace(4));
  CHECK((a4.entries * vac.amplitudes).norm() == 0.0);

  CHECK_THROWS_AS(FockSpace(1), InvalidDimensionError);
}

TEST_CASE("quadratures") {
  const auto [x, p] = quadratures(FockSpace(2));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(x.entries(0, 1) - s) < 1e-15);
  CHECK(std::abs(x.entries(1, 0) - s) < 1e-15);
  CHECK(std::abs(x.entries(0, 0)) == 0.0);

  const StateVector vac = vacuum({5});
  const auto [x5, p5] = quadratures(FockSpace(5));
  CHECK(std::abs(expectation(vac, x5)) < 1e-15);
  CHECK(std::abs(expectation(vac, p5)) < 1e-15);

  // [x, p] = iI except the truncation corner, where it is i(1 - dim).
  const int dim = 4;
  const auto [x4, p4] = quadratures(FockSpace(dim));
  const Matrix comm = x4.entries * p4.entries - p4.entries * x4.entries;
  for (int r = 0; r < dim - 1; ++r)
    for (int c = 0; c < dim - 1; ++c) {
      const Complex want = r == c ? Complex(0.0, 1.0) : Complex(0.0, 0.0);
      CHECK(std::abs(comm(r, c) - want) < 1e-12);
    }
  CHECK(std::abs(comm(dim - 1, dim - 1) - Complex(0.0, 1.0 - dim)) < 1e-12);
}

TEST_CASE("hermitian_function") {
  const int n = 4;
  const Operator zero({n}, Matrix::Zero(n, n));
  const Operator cos_zero = hermitian_function(zero, [](double v) { return std::cos(v); });
  CHECK((cos_zero.entries - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 3.14159265358979323846;
  const Operator cos_diag =
      hermitian_function(Operator({2}, d), [](double v) { return std::cos(v); });
  CHECK(std::abs(cos_diag.entries(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(cos_diag.entries(1, 1) + 1.0) < 1e-12);

  // Taylor-series oracle on a random 6x6 Hermitian matrix.
  std::mt19937_64 rng(7);
  const Matrix h = random_hermitian(6, rng);
  const Operator op({6}, h);
  const Operator via_eig = hermitian_function(op, [](double v) { return std::cos(v); });
  Matrix series = Matrix::Identity(6, 6);
  Matrix term = Matrix::Identity(6, 6);
  const Matrix h2 = h * h;
  for (int k = 1; k <= 40; ++k) {
    term = term * h2 * (-1.0 / ((2.0 * k - 1.0) * (2.0 * k)));
    series += term;
  }
  CHECK((via_eig.entries - series).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(via_eig.is_hermitian(1e-10));

  // identity function returns the operator
  const Operator same = hermitian_function(op, [](double v) { return v; });
  CHECK((same.entries - h).cwiseAbs().maxCoeff() < 1e-10);

  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_function(Operator({2}, nh), [](double v) { return v; }),
                  HermiticityError);
}

TEST_CASE("embed") {
  const std::vector<int> dims = {2, 2};
  const Operator a = annihilation(FockSpace(2));
  const Operator a0 = embed(a, 0, dims);
  // |1> (x) |0> is index 1*2+0 = 2
  Vector v = Vector::Zero(4);
  v[2] = 1.0;
  const Vector out = a0.entries * v;
  CHECK(std::abs(out[0] - 1.0) < 1e-15); // |0>(x)|0>
  CHECK(out.norm() == doctest::Approx(1.0));

  const Operator eye = identity(FockSpace(3));
  const Operator emb = embed(eye, 1, {2, 3});
  CHECK((emb.entries - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  // <1,1| x0 x1 |1,1> = <1|x|1>^2 = 0, against an explicit Kronecker contraction.
  const std::vector<int> dims33 = {3, 3};
  const auto [x3, p3] = quadratures(FockSpace(3));
  const StateVector psi = fock_state(dims33, {1, 1});
  const Operator xx = embed(x3, 0, dims33) * embed(x3, 1, dims33);
  Complex brute = 0.0;
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      for (int mm = 0; mm < 3; ++mm)
        for (int kk = 0; kk < 3; ++kk)
          brute += std::conj(psi.amplitudes[m * 3 + k]) * x3.entries(m, mm) * x3.entries(k, kk) *
                   psi.amplitudes[mm * 3 + kk];
  CHECK(std::abs(expectation(psi, xx) - brute) < 1e-12);
  CHECK(std::abs(brute) < 1e-12);

  CHECK_THROWS_AS(embed(a, 1, {2, 3}), InvalidDimensionError);
  CHECK_THROWS_AS(embed(a, 2, dims), InvalidDimensionError);
}

TEST_CASE("expectation and normalize") {
  const FockSpace f(5);
  const Operator n_op = number(f);
  CHECK(std::abs(expectation(vacuum({5}), n_op)) == 0.0);
  CHECK(std::abs(expectation(fock_state({5}, {1}), n_op) - 1.0) < 1e-15);

  std::mt19937_64 rng(11);
  const StateVector psi = random_state({5}, rng);
  CHECK(std::abs(expectation(psi, identity(f)) - 1.0) < 1e-12);

  StateVector s({2}, Vector(2));
  s.amplitudes << Complex(2.0, 0.0), Complex(0.0, 0.0);
  const StateVector ns = normalize(s);
  CHECK(ns.amplitudes[0] == Complex(1.0, 0.0));

  const StateVector again = normalize(ns);
  CHECK((again.amplitudes - ns.amplitudes).norm() < 1e-15);

  StateVector si({2}, Vector(2));
  si.amplitudes << Complex(1.0, 0.0), Complex(0.0, 1.0);
  const StateVector nsi = normalize(si);
  CHECK(std::abs(nsi.amplitudes[0] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  CHECK(std::abs(nsi.amplitudes[1] - Complex(0.0, 1.0 / std::sqrt(2.0))) < 1e-15);

  StateVector z({2}, Vector::Zero(2));
  CHECK_THROWS_AS(normalize(z), DegenerateStateError);

  CHECK_THROWS_AS(expectation(vacuum({3}), identity(FockSpace(4))), DimensionMismatchError);
}

TEST_CASE("number operator spectrum is exact") {
  const int dim = 17;
  const Operator n_op = number(FockSpace(dim));
  for (int k = 0; k < dim; ++k) CHECK(n_op.entries(k, k) == Complex(double(k), 0.0));
  // a^dag a agrees with the exact diagonal to floating-point roundoff and is PSD.
  const Operator a = annihilation(FockSpace(dim));
  const Matrix nd = a.adjoint().entries * a.entries;
  CHECK((nd - n_op.entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("disjoint-slot operators commute") {
  std::mt19937_64 rng(13);
  const std::vector<int> dims = {4, 5};
  for (int rep = 0; rep < 25; ++rep) {
    const Operator A({4}, random_hermitian(4, rng));
    const Operator B({5}, random_hermitian(5, rng));
    const Operator ab = embed(A, 0, dims) * embed(B, 1, dims);
    const Operator ba = embed(B, 1, dims) * embed(A, 0, dims);
    CHECK((ab.entries - ba.entries).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("expectation is linear in the operator") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const StateVector psi = random_state({6}, rng);
    const Operator A({6}, random_hermitian(6, rng));
    const Operator B({6}, random_hermitian(6, rng));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Complex alpha(u(rng), u(rng)), beta(u(rng), u(rng));
    const Complex lhs = expectation(psi, alpha * A + beta * B);
    const Complex rhs = alpha * expectation(psi, A) + beta * expectation(psi, B);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("coherent state properties") {
  const FockSpace f(40);
  const Complex alpha(1.3, -0.4);
  const StateVector c = coherent(f, alpha);
  CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const Operator a = annihilation(f);
  CHECK(std::abs(expectation(c, a) - alpha) < 1e-8);
  // large displacement stays finite
  const StateVector big = coherent(FockSpace(300), Complex(12.0, 0.0));
  CHECK(std::isfinite(big.norm()));
  CHECK(big.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("edge occupancy") {
  const StateVector psi = fock_state({4, 4}, {3, 0});
  const auto occ = edge_occupancy(psi);
  CHECK(occ[0] == doctest::Approx(1.0));
  CHECK(occ[1] == doctest::Approx(0.0));
}

TEST_CASE("matrix interchange round trip") {
  std::mt19937_64 rng(23);
  const Matrix m = random_hermitian(5, rng);
  std::stringstream ss;
  dump_matrix(ss, m);
  const Matrix back = load_matrix(ss);
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream bad("3 0\n");
  CHECK_THROWS(load_matrix(bad));
}
