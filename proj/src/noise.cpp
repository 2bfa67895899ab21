#include "qsdsim/noise.hpp"

#include <cmath>

namespace qsdsim::noise {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u; // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u; // sqrt(3) - 1

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}
} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::pair<double, double> NoiseStream::normal_pair() {
  const std::array<std::uint32_t, 4> ctr = {
      std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
      std::uint32_t(index_), std::uint32_t(index_ >> 32)};
  const std::array<std::uint32_t, 2> key = {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)};
  const auto r = philox4x32(ctr, key);
  ++counter_;
  const std::uint64_t a = (std::uint64_t(r[1]) << 32) | r[0];
  const std::uint64_t b = (std::uint64_t(r[3]) << 32) | r[2];
  // u1 in (0, 1], u2 in [0, 1): Box-Muller consumes exactly one block.
  const double u1 = double((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = double(b >> 11) * 0x1.0p-53;
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 6.283185307179586476925286766559 * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

std::complex<double> NoiseStream::complex_wiener(double dt) {
  const auto [eta1, eta2] = normal_pair();
  const double s = std::sqrt(0.5 * dt);
  return {eta1 * s, eta2 * s};
}

} // namespace qsdsim::noise
