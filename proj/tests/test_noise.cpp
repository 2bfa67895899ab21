#include <doctest.h>

#include <cmath>
#include <complex>

#include "qsdsim/noise.hpp"

using namespace qsdsim;
using Complex = std::complex<double>;

TEST_CASE("philox block is deterministic and key/counter sensitive") {
  const auto r1 = noise::philox4x32({1, 2, 3, 4}, {5, 6});
  const auto r2 = noise::philox4x32({1, 2, 3, 4}, {5, 6});
  CHECK(r1 == r2);
  const auto r3 = noise::philox4x32({1, 2, 3, 5}, {5, 6});
  CHECK(r1 != r3);
  const auto r4 = noise::philox4x32({1, 2, 3, 4}, {5, 7});
  CHECK(r1 != r4);
}

TEST_CASE("streams replay bit-for-bit and are independent across indices") {
  noise::NoiseStream s1(123, 7);
  noise::NoiseStream s2(123, 7);
  noise::NoiseStream other(123, 8);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const Complex a = s1.complex_wiener(0.001);
    const Complex b = s2.complex_wiener(0.001);
    CHECK(a == b);
    if (a != other.complex_wiener(0.001)) any_diff = true;
  }
  CHECK(any_diff);
  CHECK(s1.counter() == 1000);
}

TEST_CASE("seek replays a suffix") {
  noise::NoiseStream s(55, 3);
  for (int i = 0; i < 10; ++i) s.normal_pair();
  const auto val = s.normal_pair();
  noise::NoiseStream t(55, 3);
  t.seek(10);
  CHECK(t.normal_pair() == val);
}

TEST_CASE("wiener increment moments at Monte Carlo 5-sigma bounds") {
  const int n = 1'000'000;
  noise::NoiseStream s(2025, 0);

  SUBCASE("dt = 1") {
    const double dt = 1.0;
    Complex sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex xi = s.complex_wiener(dt);
      sum += xi;
      sum_sq += xi * xi;
    }
    // per-component sd sqrt(dt/2); 5 sigma on the modulus of a 2d mean
    CHECK(std::abs(sum / double(n)) < 5.0 * std::sqrt(dt / n));
    CHECK(std::abs(sum_sq / double(n)) < 5.0 * dt * std::sqrt(2.0 / n));
  }

  SUBCASE("|dxi|^2 at dt = 0.01") {
    const double dt = 0.01;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::norm(s.complex_wiener(dt));
    const double mean = acc / n;
    CHECK(std::abs(mean - dt) < 5.0 * dt / std::sqrt(double(n)));
    CHECK(std::abs(mean - dt) / dt < 0.005);
  }
}

TEST_CASE("normal pair basic stats") {
  noise::NoiseStream s(99, 1);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = s.normal_pair();
    m1 += a;
    m2 += a * a;
    cross += a * b;
  }
  CHECK(std::abs(m1 / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross / n) < 5.0 / std::sqrt(double(n)));
}
