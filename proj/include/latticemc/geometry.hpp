#pragma once

#include <cmath>

#include "latticemc/config.hpp"
#include "latticemc/vec2.hpp"

// Closed-form geometry of the four-beam lattice plus the on-axis probe.
// Two beam pairs propagate at half-angle theta to z; the pair in the xz plane
// carries y polarization, the pair in the yz plane carries x polarization.
// The probe runs along +z. All functions here are pure.

namespace latticemc {

struct DerivedGeometry {
    double omega_x;             ///< vibration frequency at a well bottom along x
    double k_x;                 ///< lattice wavevector component along x (= sin theta)
    double k_z;                 ///< lattice wavevector component along z (= cos theta)
    Vec2 dk_plus;               ///< wavevector of the +x beam minus the probe wavevector
    Vec2 dk_minus;              ///< same for the -x beam
    double dk_norm;             ///< |dk_plus| = |dk_minus| = 2 sin(theta/2)
    double lambda_mod;          ///< spatial period of the probe-induced moving modulation
    double v_mod;               ///< phase velocity of the modulation along u_plus/u_minus
    Vec2 u_plus;                ///< unit vector along dk_plus
    Vec2 u_minus;               ///< unit vector along dk_minus
    double brillouin_detuning;  ///< detuning at which the modulation rides the x propagation mode
    double sr_prediction;       ///< pump rate of maximal mode excitation (synchronization point)
};

/// Pump rate at which optical pumping synchronizes with the half-oscillation
/// period of the propagation mode. The spatial average of the pumping pattern
/// is 3/2 for the planar (y = 0) geometry; a 3D treatment would pass a
/// slightly different value.
inline double predict_sr(const LatticeConfig& cfg, double spatial_average = 1.5) {
    const double st = std::sin(cfg.half_angle);
    return 9.0 * st * std::sqrt(-cfg.light_shift) / (kPi * spatial_average);
}

inline DerivedGeometry derive_geometry(const LatticeConfig& cfg) {
    DerivedGeometry g{};
    const double st = std::sin(cfg.half_angle);
    const double ct = std::cos(cfg.half_angle);
    g.k_x = st;
    g.k_z = ct;
    g.omega_x = 4.0 * st * std::sqrt(-cfg.light_shift);
    g.dk_plus = Vec2{st, ct - 1.0};
    g.dk_minus = Vec2{-st, ct - 1.0};
    g.dk_norm = norm(g.dk_plus);
    g.lambda_mod = kTwoPi / g.dk_norm;
    g.v_mod = cfg.probe_detuning / g.dk_norm;
    g.u_plus = (1.0 / g.dk_norm) * g.dk_plus;
    g.u_minus = (1.0 / g.dk_norm) * g.dk_minus;
    g.brillouin_detuning = g.omega_x;
    g.sr_prediction = predict_sr(cfg);
    return g;
}

}  // namespace latticemc
