#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "latticemc/ensemble.hpp"
#include "latticemc/observables/bunching.hpp"
#include "latticemc/stats.hpp"

// Pump-probe spectrum machinery.
//
// The per-detuning signal is the out-of-phase quadrature A sin(phi) of the
// moving-frame density grating: the probe gain tracks the part of the matter
// modulation shifted against the driving potential, and the overall scale is
// irrelevant because the line amplitudes below are free parameters.
//
// Spectra are then reduced with a damped (Levenberg-style) least-squares fit
// of   I(d) = slope d + offset
//            + A_R exp(-(d - W_R)^2 / 2 s_R^2)
//            + A_B exp(-(d - W_B)^2 / 2 s_B^2),
// a linear background for the far wing of the central relaxational line plus
// Gaussians for the vibrational (Raman) and propagation-mode (Brillouin)
// resonances.

namespace latticemc {

struct SpectrumPoint {
    double detuning = 0.0;
    double value = 0.0;
    double error = 0.0;
};

struct SpectrumPointOptions {
    BunchingOptions bunching{};
    std::optional<StepControl> control_override{};
    int max_threads = 0;
};

/// Run one ensemble at the detuning carried by `cfg` and reduce it to the
/// density-grating quadrature signal.
inline SpectrumPoint spectrum_point(const LatticeConfig& cfg, const DerivedGeometry& geom,
                                    const EnsembleConfig& ens,
                                    const SpectrumPointOptions& opt = {}) {
    if (!(cfg.probe_ratio > 0.0))
        throw Error(Errc::probe_off, "spectrum_point needs the probe on");
    const EnsembleResult res =
        run_ensemble(cfg, geom, ens, opt.control_override, opt.max_threads);
    const BunchingResult b = bunching_histogram(res.records, cfg, geom, opt.bunching);
    SpectrumPoint p;
    p.detuning = cfg.probe_detuning;
    p.value = b.quadrature;
    p.error = b.quadrature_err;
    return p;
}

struct SpectrumFit {
    double bg_slope = 0.0;
    double bg_offset = 0.0;
    double a_raman = 0.0;
    double omega_raman = 0.0;
    double sigma_raman = 0.0;
    double a_brillouin = 0.0;
    double omega_brillouin = 0.0;
    double sigma_brillouin = 0.0;
    double residual_norm = 0.0;
    std::array<double, 8> covariance_diag{};
    int iterations = 0;
    bool converged = false;
    bool degenerate_lines = false;  ///< |W_R - W_B| < max(s_R, s_B)/2 at the solution
};

struct SpectrumFitOptions {
    double step_tolerance = 1e-8;
    int max_iterations = 200;
    std::vector<double>* cost_trace = nullptr;  ///< accepted costs, for the damped-step contract
};

namespace detail {

inline double spectrum_model(double d, std::span<const double, 8> p) {
    const double gr = std::exp(-0.5 * (d - p[3]) * (d - p[3]) / (p[4] * p[4]));
    const double gb = std::exp(-0.5 * (d - p[6]) * (d - p[6]) / (p[7] * p[7]));
    return p[0] * d + p[1] + p[2] * gr + p[5] * gb;
}

inline void spectrum_jacobian(double d, std::span<const double, 8> p, std::span<double, 8> j) {
    const double ur = (d - p[3]) / (p[4] * p[4]);
    const double ub = (d - p[6]) / (p[7] * p[7]);
    const double gr = std::exp(-0.5 * (d - p[3]) * ur);
    const double gb = std::exp(-0.5 * (d - p[6]) * ub);
    j[0] = d;
    j[1] = 1.0;
    j[2] = gr;
    j[3] = p[2] * gr * ur;
    j[4] = p[2] * gr * ur * (d - p[3]) / p[4];
    j[5] = gb;
    j[6] = p[5] * gb * ub;
    j[7] = p[5] * gb * ub * (d - p[6]) / p[7];
}

}  // namespace detail

namespace detail {

struct LmRun {
    std::array<double, 8> p{};
    double cost = HUGE_VAL;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

/// Damped least squares from one starting point. `clamp` projects a trial
/// into the admissible box before it is evaluated, so accepted costs are
/// monotone by construction. Parameters with `active[d] == false` stay frozen
/// (used to fit the background + one line before seeding the other).
template <typename ClampFn>
LmRun run_lm(std::span<const SpectrumPoint> points, std::span<const double> w,
             std::array<double, 8> p, const SpectrumFitOptions& opt, ClampFn clamp,
             const std::array<bool, 8>& active = {true, true, true, true, true, true, true,
                                                  true}) {
    const std::size_t n = points.size();
    auto cost_of = [&](std::span<const double, 8> q) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = spectrum_model(points[i].detuning, q) - points[i].value;
            c += w[i] * r * r;
        }
        return c;
    };

    LmRun run;
    clamp(p);
    run.p = p;
    run.cost = cost_of(p);
    if (!std::isfinite(run.cost))
        throw Error(Errc::fit_diverged, "fit_spectrum: non-finite cost at the initial point");
    run.trace.push_back(run.cost);

    double lambda = 1e-3;
    for (; run.iterations < opt.max_iterations && !run.converged; ++run.iterations) {
        std::vector<double> jtj(64, 0.0), jtr(8, 0.0);
        std::array<double, 8> jrow{};
        for (std::size_t i = 0; i < n; ++i) {
            spectrum_jacobian(points[i].detuning, run.p, jrow);
            const double r = spectrum_model(points[i].detuning, run.p) - points[i].value;
            for (std::size_t a = 0; a < 8; ++a) {
                jtr[a] += w[i] * jrow[a] * r;
                for (std::size_t b = 0; b <= a; ++b) jtj[a * 8 + b] += w[i] * jrow[a] * jrow[b];
            }
        }
        for (std::size_t a = 0; a < 8; ++a)
            for (std::size_t b = a + 1; b < 8; ++b) jtj[a * 8 + b] = jtj[b * 8 + a];

        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            std::vector<double> a_damped = jtj;
            for (std::size_t d = 0; d < 8; ++d)
                a_damped[d * 8 + d] += lambda * (jtj[d * 8 + d] + 1e-12);
            std::vector<double> rhs(8);
            for (std::size_t d = 0; d < 8; ++d) rhs[d] = -jtr[d];
            for (std::size_t d = 0; d < 8; ++d) {
                if (active[d]) continue;
                rhs[d] = 0.0;
                for (std::size_t e = 0; e < 8; ++e) {
                    a_damped[d * 8 + e] = d == e ? 1.0 : 0.0;
                    a_damped[e * 8 + d] = d == e ? 1.0 : 0.0;
                }
            }
            if (!solve_linear(a_damped, rhs, 8)) {
                lambda *= 4.0;
                continue;
            }
            std::array<double, 8> trial = run.p;
            for (std::size_t d = 0; d < 8; ++d)
                if (active[d]) trial[d] += rhs[d];
            clamp(trial);
            double step2 = 0.0, ref2 = 0.0;
            for (std::size_t d = 0; d < 8; ++d) {
                const double dd = trial[d] - run.p[d];
                step2 += dd * dd;
                ref2 += run.p[d] * run.p[d];
            }
            const double trial_cost = cost_of(trial);
            if (std::isfinite(trial_cost) && trial_cost <= run.cost) {
                run.p = trial;
                run.cost = trial_cost;
                run.trace.push_back(trial_cost);
                lambda = std::max(lambda * 0.3, 1e-14);
                accepted = true;
                if (std::sqrt(step2) < opt.step_tolerance * (std::sqrt(ref2) + 1e-30))
                    run.converged = true;
            } else {
                lambda *= 4.0;
                if (lambda > 1e16) break;
            }
        }
        if (!accepted) break;  // damping saturated: stationary within tolerance
    }
    return run;
}

}  // namespace detail

/// Fit the four-term line model. `omega_hint` seeds the Brillouin center
/// (callers pass the geometric mode frequency); the Raman Gaussian is
/// multi-started from the strongest residual candidates away from the
/// Brillouin seed, and the lowest-cost run wins. Centers are confined to the
/// scanned range and widths to [spacing/3, span]: a Gaussian wider than the
/// scan is a background, not a line.
inline SpectrumFit fit_spectrum(std::span<const SpectrumPoint> points, double omega_hint,
                                const SpectrumFitOptions& opt = {}) {
    const std::size_t n = points.size();
    if (n < 12)
        throw Error(Errc::insufficient_data, "fit_spectrum needs at least 12 points");

    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        if (points[i].error > 0.0) w[i] = 1.0 / (points[i].error * points[i].error);

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = points[i].detuning;
        ys[i] = points[i].value;
    }
    double lo = xs[0], hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = hi - lo;
    double spacing = 0.0;
    for (std::size_t i = 1; i < n; ++i) spacing += std::fabs(xs[i] - xs[i - 1]);
    spacing /= static_cast<double>(n - 1);

    auto clamp = [&](std::array<double, 8>& q) {
        auto box = [](double v, double a, double b) { return std::min(std::max(v, a), b); };
        q[3] = box(q[3], lo - 0.25 * span, hi + 0.25 * span);
        q[6] = box(q[6], lo - 0.25 * span, hi + 0.25 * span);
        const double wmin = spacing / 3.0, wmax = span;
        q[4] = std::fabs(q[4]);
        q[7] = std::fabs(q[7]);
        q[4] = box(q[4], wmin, wmax);
        q[7] = box(q[7], wmin, wmax);
    };

    // --- phase 1: background + Brillouin line only ---
    std::array<double, 8> base{};
    const PolyFit line = polyfit(xs, ys, w, 1);
    base[0] = line.coeff[1];
    base[1] = line.coeff[0];
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = ys[i] - (base[0] * xs[i] + base[1]);
    std::size_t ib = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::fabs(xs[i] - omega_hint) < std::fabs(xs[ib] - omega_hint)) ib = i;
    base[2] = 0.0;  // Raman frozen off in this phase
    base[3] = lo;
    base[4] = 3.0 * spacing;
    base[5] = resid[ib];
    base[6] = omega_hint;
    base[7] = 3.0 * spacing;
    const detail::LmRun peel = detail::run_lm(
        points, w, base, opt, clamp,
        {true, true, false, false, false, true, true, true});

    // --- phase 2: Raman seeded from the peeled residual, best of three ---
    std::vector<double> r2(n);
    for (std::size_t i = 0; i < n; ++i)
        r2[i] = points[i].value - detail::spectrum_model(xs[i], peel.p);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(r2[a]) > std::fabs(r2[b]); });
    std::vector<std::size_t> candidates;
    for (std::size_t i : order) {
        if (std::fabs(xs[i] - peel.p[6]) < peel.p[7]) continue;  // already the Brillouin line
        candidates.push_back(i);
        if (candidates.size() == 3) break;
    }
    if (candidates.empty()) candidates.push_back(order.front());

    detail::LmRun best;
    for (std::size_t ir : candidates) {
        std::array<double, 8> p = peel.p;
        p[2] = r2[ir];
        p[3] = xs[ir];
        p[4] = 3.0 * spacing;
        const detail::LmRun run = detail::run_lm(points, w, p, opt, clamp);
        if (run.cost < best.cost) best = run;
    }
    if (opt.cost_trace) *opt.cost_trace = best.trace;

    std::array<double, 8> p = best.p;
    const double cost = best.cost;
    const bool converged = best.converged;
    const int iter = best.iterations;

    SpectrumFit out;

    out.bg_slope = p[0];
    out.bg_offset = p[1];
    out.a_raman = p[2];
    out.omega_raman = p[3];
    out.sigma_raman = p[4];
    out.a_brillouin = p[5];
    out.omega_brillouin = p[6];
    out.sigma_brillouin = p[7];
    out.residual_norm = std::sqrt(cost);
    out.iterations = iter;
    out.converged = converged;
    out.degenerate_lines = std::fabs(p[3] - p[6]) < 0.5 * std::max(p[4], p[7]);

    std::vector<double> jtj(64, 0.0);
    std::array<double, 8> jrow{};
    for (std::size_t i = 0; i < n; ++i) {
        detail::spectrum_jacobian(points[i].detuning, p, jrow);
        for (std::size_t a = 0; a < 8; ++a)
            for (std::size_t b = 0; b < 8; ++b) jtj[a * 8 + b] += w[i] * jrow[a] * jrow[b];
    }
    const std::vector<double> cov = invert_matrix(jtj, 8);
    if (!cov.empty())
        for (std::size_t d = 0; d < 8; ++d) out.covariance_diag[d] = cov[d * 8 + d];
    else
        out.covariance_diag.fill(std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace latticemc
