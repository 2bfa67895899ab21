// Physical constants pinned for reproducibility. All flux-quantum derived
// quantities in this codebase trace back to this one table.
#pragma once

namespace qsdsim::constants {

// CODATA 2018 exact values (SI).
inline constexpr double planck_h = 6.62607015e-34;       // J s
inline constexpr double electron_charge = 1.602176634e-19; // C
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = planck_h / (2.0 * pi);     // J s
inline constexpr double flux_quantum = planck_h / (2.0 * electron_charge); // Wb, h/2e

} // namespace qsdsim::constants
