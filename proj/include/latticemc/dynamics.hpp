#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "latticemc/field.hpp"
#include "latticemc/rng.hpp"

// Single-trajectory stochastic integrator. One step is:
//   1. velocity-Verlet drift on the force of the current sublevel, with the
//      probe phase frozen at the half-step time (second-order in dt for the
//      time-dependent drive);
//   2. a Bernoulli optical-pumping trial with probability gamma * dt at the
//      post-drift position; on a flip the sublevel changes and, when enabled,
//      two unit momentum kicks in uniformly random directions model the
//      absorbed and the spontaneously emitted photon;
//   3. a Gaussian momentum increment per axis with variance
//      noise_scale * R_s * dt, the isotropic stand-in for the momentum
//      diffusion driven by photon scattering at rate R_s.
// Rates are bounded so that gamma * dt <= 0.05, keeping the first-order jump
// sampling error below statistical noise.

namespace latticemc {

struct AtomState {
    Vec2 r;                          ///< position (1/k units)
    Vec2 p;                          ///< momentum (hbar k units)
    Sublevel s = Sublevel::minus;
    double t = 0.0;                  ///< local time (1/omega_r units)
};

struct StepControl {
    double dt = 0.0;                 ///< time step (1/omega_r)
    double noise_scale = 1.0;        ///< eta, scale of the continuous momentum diffusion
    bool jump_recoil = true;         ///< add recoil kicks at pumping events
};

/// Analytic bound on the pumping rate anywhere in the field (|a_y| <= 2 + eps).
inline double max_pump_rate(const LatticeConfig& cfg) {
    const double eps = std::sqrt(cfg.probe_ratio);
    const double iota_max = 0.5 * (4.0 + eps) * (4.0 + eps);
    return (2.0 / 9.0) * cfg.pump_rate * iota_max;
}

/// Time step from the three resolution requirements: 200 steps per well
/// oscillation, 200 steps per probe beat period, and gamma_max * dt <= 0.05.
inline StepControl choose_dt(const LatticeConfig& cfg, const DerivedGeometry& geom) {
    if (cfg.pump_rate == 0.0 && geom.omega_x == 0.0)
        throw Error(Errc::degenerate_dynamics,
                    "no dynamics: pump_rate and omega_x are both zero");
    double dt = HUGE_VAL;
    if (geom.omega_x > 0.0) dt = std::min(dt, (kTwoPi / geom.omega_x) / 200.0);
    if (cfg.probe_ratio > 0.0 && cfg.probe_detuning > 0.0)
        dt = std::min(dt, (kTwoPi / cfg.probe_detuning) / 200.0);
    const double gmax = max_pump_rate(cfg);
    if (gmax > 0.0) dt = std::min(dt, 0.05 / gmax);
    StepControl c;
    c.dt = dt;
    return c;
}

inline void check_finite(const AtomState& a) {
    if (!(std::isfinite(a.r.x) && std::isfinite(a.r.z) && std::isfinite(a.p.x) &&
          std::isfinite(a.p.z)))
        throw Error(Errc::numerical_blowup,
                    "non-finite state at t = " + std::to_string(a.t));
}

/// Advance one step of dt; see the scheme at the top of this header.
inline void step(AtomState& a, const StepControl& c, const FieldParams& fp, Xoshiro256& rng) {
    const double dt = c.dt;
    const double t_mid = a.t + 0.5 * dt;

    const FieldCore f1 = field_core(a.r, t_mid, fp);
    const Vec2 half_kick = a.p + (0.5 * dt) * force_on(f1, a.s, fp.light_shift);
    a.r += (dt / kAtomMass) * half_kick;
    const FieldCore f2 = field_core(a.r, t_mid, fp);
    a.p = half_kick + (0.5 * dt) * force_on(f2, a.s, fp.light_shift);

    const double gamma = pump_rate_from(f2, a.s, fp.pump_rate);
    const double u = rng.uniform01();
    if (u < gamma * dt) {
        a.s = other(a.s);
        if (c.jump_recoil) {
            double s1, c1, s2, c2;
            fast_sincos(rng.angle(), s1, c1);
            fast_sincos(rng.angle(), s2, c2);
            a.p.x += c1 + c2;
            a.p.z += s1 + s2;
        }
    }
    if (fp.pump_rate > 0.0 && c.noise_scale > 0.0) {
        const double sd = std::sqrt(c.noise_scale * scatter_rate(f2, a.s, fp.pump_rate) * dt);
        const auto [n1, n2] = rng.normal_pair();
        a.p.x += sd * n1;
        a.p.z += sd * n2;
    }
    a.t += dt;
    check_finite(a);
}

/// Sampled time series of one trajectory. Columns share the index; sublevels
/// are stored as 0 (plus) / 1 (minus).
struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> px;
    std::vector<double> pz;
    std::vector<std::uint8_t> s;
    double sampling_interval = 0.0;  ///< actual spacing (an integer multiple of dt)

    std::size_t size() const { return t.size(); }
    void push_back(const AtomState& a) {
        t.push_back(a.t);
        x.push_back(a.r.x);
        z.push_back(a.r.z);
        px.push_back(a.p.x);
        pz.push_back(a.p.z);
        s.push_back(static_cast<std::uint8_t>(a.s));
    }
};

/// Integrate for `horizon`, recording every `sampling_interval` (rounded to a
/// whole number of steps). The initial state is always the first sample.
inline TrajectoryRecord simulate_trajectory(AtomState state, double horizon,
                                            double sampling_interval, const StepControl& c,
                                            const FieldParams& fp, Xoshiro256& rng) {
    TrajectoryRecord rec;
    const long long steps_per_sample =
        std::max(1LL, static_cast<long long>(std::llround(sampling_interval / c.dt)));
    rec.sampling_interval = static_cast<double>(steps_per_sample) * c.dt;
    const long long n_steps =
        horizon <= 0.0 ? 0 : static_cast<long long>(std::ceil(horizon / c.dt - 1e-9));
    rec.t.reserve(static_cast<std::size_t>(n_steps / steps_per_sample) + 2);
    rec.push_back(state);
    for (long long i = 1; i <= n_steps; ++i) {
        step(state, c, fp, rng);
        if (i % steps_per_sample == 0) rec.push_back(state);
    }
    return rec;
}

}  // namespace latticemc
