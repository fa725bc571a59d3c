#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>

#include "latticemc/config.hpp"
#include "latticemc/geometry.hpp"
#include "latticemc/trig.hpp"
#include "latticemc/vec2.hpp"

// Optical field, bipotentials and pumping rates at y = 0.
//
// The two beams in the xz plane (y-polarized) sum to a_y = 2 cos(k_x x)
// e^{i k_z z}; the two beams in the yz plane (x-polarized) sum to
// a_x = 2 cos(k_y y) e^{-i k_z z}, which the y = 0 restriction reduces to
// 2 e^{-i k_z z}. The probe (amplitude eps = sqrt(I_P/I_L), y-polarized,
// along +z, detuned by delta) adds eps e^{i(z + delta t)} to a_y, so its
// beat with each xz beam is a potential modulation travelling along
// dk_pm = k_lattice(+-x) - k_probe with phase velocity delta/|dk_pm|.
//
// In the circular basis iota_pm = |a_x -+ i a_y|^2 / 2, and for the
// J=1/2 -> 3/2 sublevel couplings the light shift of |pm> weights iota_pm
// with 1 and iota_mp with 1/3:
//
//   U_pm      = light_shift * (iota_pm + iota_mp / 3)
//   gamma_pm  = (2 pump_rate / 9) * iota_mp     (pumping |pm> -> |mp>)
//   R_pm      = (2/3) pump_rate * (iota_pm + iota_mp / 3)
//
// Everything below is closed-form; forces are the exact analytic gradients.

namespace latticemc {

enum class Sublevel : std::uint8_t { plus = 0, minus = 1 };

inline Sublevel other(Sublevel s) { return s == Sublevel::plus ? Sublevel::minus : Sublevel::plus; }

/// Constants the integrator needs per field evaluation, hoisted out of the hot loop.
struct FieldParams {
    double k_x;
    double k_z;
    double eps;          ///< probe amplitude sqrt(probe_ratio)
    double detuning;
    double light_shift;
    double pump_rate;
    bool probe_on;
};

inline FieldParams make_field_params(const LatticeConfig& cfg, const DerivedGeometry& geom) {
    FieldParams p{};
    p.k_x = geom.k_x;
    p.k_z = geom.k_z;
    p.eps = std::sqrt(cfg.probe_ratio);
    p.detuning = cfg.probe_detuning;
    p.light_shift = cfg.light_shift;
    p.pump_rate = cfg.pump_rate;
    p.probe_on = cfg.probe_ratio > 0.0;
    return p;
}

/// Scalar decomposition of the local field:
///   iota_plus = s0 - v, iota_minus = s0 + v,
/// with s0 = (|a_x|^2 + |a_y|^2)/2 and v = Im(a_y conj(a_x)), plus their
/// spatial gradients.
struct FieldCore {
    double s0;
    double v;
    Vec2 grad_s0;
    Vec2 grad_v;
};

inline FieldCore field_core(const Vec2& r, double t, const FieldParams& p) {
    FieldCore f{};
    double sx, cx;
    fast_sincos(p.k_x * r.x, sx, cx);
    if (p.probe_on) {
        // a1 + a2 = 2 k_z z, so sincos(2 k_z z) comes from the sum formulas.
        const double a1 = (p.k_z - 1.0) * r.z - p.detuning * t;
        const double a2 = (p.k_z + 1.0) * r.z + p.detuning * t;
        double s1, c1, s2, c2;
        fast_sincos(a1, s1, c1);
        fast_sincos(a2, s2, c2);
        const double s2b = s1 * c2 + c1 * s2;
        const double c2b = c1 * c2 - s1 * s2;
        f.s0 = 2.0 + 2.0 * cx * cx + 0.5 * p.eps * p.eps + 2.0 * cx * p.eps * c1;
        f.v = 4.0 * cx * s2b + 2.0 * p.eps * s2;
        f.grad_s0.x = -p.k_x * sx * (4.0 * cx + 2.0 * p.eps * c1);
        f.grad_s0.z = -2.0 * cx * p.eps * (p.k_z - 1.0) * s1;
        f.grad_v.x = -4.0 * p.k_x * sx * s2b;
        f.grad_v.z = 8.0 * cx * p.k_z * c2b + 2.0 * p.eps * (1.0 + p.k_z) * c2;
    } else {
        double s2b, c2b;
        fast_sincos(2.0 * p.k_z * r.z, s2b, c2b);
        f.s0 = 2.0 + 2.0 * cx * cx;
        f.v = 4.0 * cx * s2b;
        f.grad_s0.x = -4.0 * p.k_x * sx * cx;
        f.grad_s0.z = 0.0;
        f.grad_v.x = -4.0 * p.k_x * sx * s2b;
        f.grad_v.z = 8.0 * cx * p.k_z * c2b;
    }
    return f;
}

inline double potential_on(const FieldCore& f, Sublevel s, double light_shift) {
    const double sign_v = (s == Sublevel::plus) ? -1.0 : 1.0;
    return light_shift * ((4.0 / 3.0) * f.s0 + sign_v * (2.0 / 3.0) * f.v);
}

inline Vec2 force_on(const FieldCore& f, Sublevel s, double light_shift) {
    const double sign_v = (s == Sublevel::plus) ? -1.0 : 1.0;
    const double cs = -light_shift * (4.0 / 3.0);
    const double cv = -light_shift * sign_v * (2.0 / 3.0);
    return Vec2{cs * f.grad_s0.x + cv * f.grad_v.x, cs * f.grad_s0.z + cv * f.grad_v.z};
}

/// Optical pumping rate out of sublevel s (driven by the opposite sigma component).
inline double pump_rate_from(const FieldCore& f, Sublevel s, double pump_rate) {
    const double iota_other = (s == Sublevel::plus) ? f.s0 + f.v : f.s0 - f.v;
    return std::max(0.0, (2.0 / 9.0) * pump_rate * iota_other);
}

/// Total photon scattering rate of an atom in sublevel s.
inline double scatter_rate(const FieldCore& f, Sublevel s, double pump_rate) {
    const double sign_v = (s == Sublevel::plus) ? -1.0 : 1.0;
    return std::max(0.0, (2.0 / 9.0) * pump_rate * (4.0 * f.s0 + sign_v * 2.0 * f.v));
}

/// Complex field amplitudes (a_x, a_y) in single-beam units.
inline std::pair<std::complex<double>, std::complex<double>> amplitudes(
    const Vec2& r, double t, const LatticeConfig& cfg, const DerivedGeometry& geom) {
    using namespace std::complex_literals;
    const double eps = std::sqrt(cfg.probe_ratio);
    const std::complex<double> a_x = 2.0 * std::exp(-1i * (geom.k_z * r.z));
    const std::complex<double> a_y = 2.0 * std::cos(geom.k_x * r.x) * std::exp(1i * (geom.k_z * r.z)) +
                                     eps * std::exp(1i * (r.z + cfg.probe_detuning * t));
    return {a_x, a_y};
}

/// Circular-basis intensities (iota_plus, iota_minus).
inline std::pair<double, double> sigma_intensities(std::complex<double> a_x,
                                                   std::complex<double> a_y) {
    using namespace std::complex_literals;
    const double ip = 0.5 * std::norm(a_x + 1i * a_y);
    const double im = 0.5 * std::norm(a_x - 1i * a_y);
    return {ip, im};
}

/// Everything the field determines locally at (r, t).
struct FieldSample {
    std::complex<double> amp_x;
    std::complex<double> amp_y;
    double iota_plus;
    double iota_minus;
    double potential_plus;
    double potential_minus;
    Vec2 force_plus;
    Vec2 force_minus;
    double pump_plus_to_minus;
    double pump_minus_to_plus;
    double scatter_plus;
    double scatter_minus;
};

inline FieldSample sample_field(const Vec2& r, double t, const LatticeConfig& cfg,
                                const DerivedGeometry& geom) {
    FieldSample out{};
    std::tie(out.amp_x, out.amp_y) = amplitudes(r, t, cfg, geom);
    std::tie(out.iota_plus, out.iota_minus) = sigma_intensities(out.amp_x, out.amp_y);
    out.potential_plus = cfg.light_shift * (out.iota_plus + out.iota_minus / 3.0);
    out.potential_minus = cfg.light_shift * (out.iota_minus + out.iota_plus / 3.0);
    const FieldParams p = make_field_params(cfg, geom);
    const FieldCore f = field_core(r, t, p);
    out.force_plus = force_on(f, Sublevel::plus, cfg.light_shift);
    out.force_minus = force_on(f, Sublevel::minus, cfg.light_shift);
    out.pump_plus_to_minus = (2.0 / 9.0) * cfg.pump_rate * out.iota_minus;
    out.pump_minus_to_plus = (2.0 / 9.0) * cfg.pump_rate * out.iota_plus;
    out.scatter_plus = (2.0 / 3.0) * cfg.pump_rate * (out.iota_plus + out.iota_minus / 3.0);
    out.scatter_minus = (2.0 / 3.0) * cfg.pump_rate * (out.iota_minus + out.iota_plus / 3.0);
    return out;
}

}  // namespace latticemc
