#pragma once

#include <cmath>
#include <string>

#include "latticemc/errors.hpp"

// Unit system: recoil units throughout. With hbar = 1, k = 1 (laser
// wavenumber) and omega_r = hbar k^2 / 2M = 1, the atomic mass is M = 1/2.
// Lengths are measured in 1/k, momenta in hbar k, energies and angular
// frequencies (including all rates) in hbar omega_r / omega_r, times in
// 1/omega_r. Free flight then reads dx/dt = p/M = 2 p.

namespace latticemc {

inline constexpr double kAtomMass = 0.5;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

/// Physical parameters of one lattice + probe configuration.
struct LatticeConfig {
    double light_shift = -200.0;   ///< light shift per lattice beam (omega_r units, < 0)
    double pump_rate = 13.0;       ///< photon scattering rate per beam (omega_r units, >= 0)
    double half_angle = kPi / 6;   ///< beam half-angle with the z axis (radians, in (0, pi/2))
    double probe_ratio = 0.09;     ///< probe intensity over lattice-beam intensity, eps^2 >= 0
    double probe_detuning = 0.0;   ///< probe-minus-lattice detuning delta (omega_r units)
};

/// Check the field invariants; returns the config unchanged when they hold.
inline LatticeConfig validate(const LatticeConfig& cfg) {
    if (!(cfg.light_shift < 0.0))
        throw Error(Errc::red_detuning_required,
                    "light_shift must be negative (red detuning), got " +
                        std::to_string(cfg.light_shift));
    if (!(cfg.half_angle > 0.0 && cfg.half_angle < kPi / 2))
        throw Error(Errc::invalid_angle,
                    "half_angle must lie in (0, pi/2), got " + std::to_string(cfg.half_angle));
    if (!(cfg.pump_rate >= 0.0))
        throw Error(Errc::negative_rate,
                    "pump_rate must be >= 0, got " + std::to_string(cfg.pump_rate));
    if (!(cfg.probe_ratio >= 0.0))
        throw Error(Errc::negative_probe_ratio,
                    "probe_ratio must be >= 0, got " + std::to_string(cfg.probe_ratio));
    if (!std::isfinite(cfg.probe_detuning))
        throw Error(Errc::type_mismatch, "probe_detuning must be finite");
    return cfg;
}

}  // namespace latticemc
