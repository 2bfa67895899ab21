// Counter-based random numbers for reproducible parallel ensembles:
// (seed, trajectory_index, counter) -> increments, with no shared mutable
// state between trajectories.
#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace qsdsim::noise {

// Philox4x32-10 block cipher (Salmon et al.). One block maps a 128-bit
// counter and 64-bit key to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Deterministic stream of standard normals / complex Wiener increments.
// The counter advances by one block per normal pair; identical
// (seed, trajectory_index) replay the identical sequence bit for bit.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t trajectory_index)
      : seed_(seed), index_(trajectory_index), counter_(0) {}

  // Two independent standard normals from one Philox block (Box-Muller).
  std::pair<double, double> normal_pair();

  // dxi = (eta1 + i eta2) sqrt(dt/2): E[dxi] = E[dxi^2] = 0, E[|dxi|^2] = dt.
  std::complex<double> complex_wiener(double dt);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t trajectory_index() const { return index_; }
  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t counter_;
};

} // namespace qsdsim::noise
