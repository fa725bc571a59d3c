#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "latticemc/dynamics.hpp"
#include "latticemc/rng.hpp"
#include "latticemc/stats.hpp"

// Spatial diffusion from the time-and-ensemble averaged mean squared
// displacement. The coefficient is the weighted through-origin slope of
// MSD(tau) = 2 D tau over the late-time window, with a log-log slope
// diagnostic guarding that the window is actually diffusive and a bootstrap
// over atoms for the standard error. Offsets cancel: only displacement
// pairs within the measurement window enter.

namespace latticemc {

enum class Axis { x, z };

struct DiffusionOptions {
    double window_lo = 0.5;          ///< fit window [window_lo, window_hi] * max lag
    double window_hi = 1.0;
    int max_lags = 160;              ///< decimate the lag grid to at most this many points
    int bootstrap_rounds = 200;
    std::uint64_t bootstrap_seed = 0x9E3779B97F4A7C15ULL;
    double slope_lo = 0.8;           ///< acceptable log-log slope band
    double slope_hi = 1.2;
};

struct DiffusionResult {
    double d = 0.0;                  ///< diffusion coefficient (omega_r / k^2 units)
    double d_err = 0.0;
    double window_lo = 0.0;          ///< fit window in time units
    double window_hi = 0.0;
    double loglog_slope = 1.0;
    double loglog_slope_err = 0.0;   ///< bootstrap spread of the diagnostic
};

namespace detail {

inline const std::vector<double>& axis_series(const TrajectoryRecord& r, Axis a) {
    return a == Axis::x ? r.x : r.z;
}

}  // namespace detail

inline DiffusionResult msd_diffusion(std::span<const TrajectoryRecord> records, Axis axis,
                                     const DiffusionOptions& opt = {}) {
    if (records.size() < 10)
        throw Error(Errc::insufficient_data, "msd_diffusion needs at least 10 records");
    std::size_t min_len = records[0].size();
    for (const auto& r : records) min_len = std::min(min_len, r.size());
    if (min_len < 2)
        throw Error(Errc::insufficient_data, "msd_diffusion needs at least 2 samples per record");
    const double dt_s = records[0].sampling_interval;

    const std::size_t max_lag = min_len - 1;
    const auto lag_lo = static_cast<std::size_t>(std::ceil(opt.window_lo * max_lag));
    const auto lag_hi = static_cast<std::size_t>(std::floor(opt.window_hi * max_lag));
    std::vector<std::size_t> lags;
    const std::size_t stride =
        std::max<std::size_t>(1, (lag_hi - lag_lo + 1) / static_cast<std::size_t>(opt.max_lags));
    for (std::size_t l = std::max<std::size_t>(1, lag_lo); l <= lag_hi; l += stride)
        lags.push_back(l);
    if (lags.size() < 2)
        throw Error(Errc::insufficient_data, "msd_diffusion: fit window has fewer than 2 lags");

    // per-atom MSD curves, averaged over all origins
    const std::size_t n_atoms = records.size();
    std::vector<double> msd(n_atoms * lags.size(), 0.0);
    for (std::size_t a = 0; a < n_atoms; ++a) {
        const auto& xs = detail::axis_series(records[a], axis);
        for (std::size_t li = 0; li < lags.size(); ++li) {
            const std::size_t l = lags[li];
            double acc = 0.0;
            const std::size_t n_origins = min_len - l;
            for (std::size_t i = 0; i < n_origins; ++i) {
                const double d = xs[i + l] - xs[i];
                acc += d * d;
            }
            msd[a * lags.size() + li] = acc / static_cast<double>(n_origins);
        }
    }

    std::vector<double> msd_mean(lags.size(), 0.0), msd_se2(lags.size(), 0.0);
    for (std::size_t li = 0; li < lags.size(); ++li) {
        double s = 0.0;
        for (std::size_t a = 0; a < n_atoms; ++a) s += msd[a * lags.size() + li];
        msd_mean[li] = s / static_cast<double>(n_atoms);
        double v = 0.0;
        for (std::size_t a = 0; a < n_atoms; ++a) {
            const double d = msd[a * lags.size() + li] - msd_mean[li];
            v += d * d;
        }
        msd_se2[li] = v / (static_cast<double>(n_atoms - 1) * static_cast<double>(n_atoms));
    }

    DiffusionResult out;
    out.window_lo = static_cast<double>(lags.front()) * dt_s;
    out.window_hi = static_cast<double>(lags.back()) * dt_s;

    const double msd_max = *std::max_element(msd_mean.begin(), msd_mean.end());
    if (msd_max <= 0.0) return out;  // stationary records: D = 0

    // weighted through-origin fit MSD = 2 D tau
    auto fit_d = [&](std::span<const double> curve) {
        double num = 0.0, den = 0.0;
        for (std::size_t li = 0; li < lags.size(); ++li) {
            const double tau = static_cast<double>(lags[li]) * dt_s;
            const double w = msd_se2[li] > 0.0 ? 1.0 / msd_se2[li] : 1.0;
            num += w * tau * curve[li];
            den += w * tau * tau;
        }
        return num / (2.0 * den);
    };
    out.d = fit_d(msd_mean);

    // log-log slope over the same window
    auto fit_slope = [&](std::span<const double> curve) {
        std::vector<double> lx, ly, lw;
        for (std::size_t li = 0; li < lags.size(); ++li) {
            if (curve[li] <= 0.0) continue;
            lx.push_back(std::log(static_cast<double>(lags[li]) * dt_s));
            ly.push_back(std::log(curve[li]));
            lw.push_back(1.0);
        }
        if (lx.size() < 2) return 0.0;
        return polyfit(lx, ly, lw, 1).coeff[1];
    };
    out.loglog_slope = fit_slope(msd_mean);

    // bootstrap over atoms (both the coefficient and the slope diagnostic)
    Xoshiro256 rng(opt.bootstrap_seed);
    std::vector<double> boot_d, boot_slope;
    boot_d.reserve(static_cast<std::size_t>(opt.bootstrap_rounds));
    std::vector<double> curve(lags.size());
    for (int b = 0; b < opt.bootstrap_rounds; ++b) {
        std::fill(curve.begin(), curve.end(), 0.0);
        for (std::size_t a = 0; a < n_atoms; ++a) {
            const std::size_t pick = static_cast<std::size_t>(rng.next() % n_atoms);
            for (std::size_t li = 0; li < lags.size(); ++li)
                curve[li] += msd[pick * lags.size() + li];
        }
        for (double& v : curve) v /= static_cast<double>(n_atoms);
        boot_d.push_back(fit_d(curve));
        boot_slope.push_back(fit_slope(curve));
    }
    out.d_err = std::sqrt(variance(boot_d));
    out.loglog_slope_err = std::sqrt(variance(boot_slope));

    // Guard against non-diffusive windows. The point estimate carries
    // statistical noise of its own, so the band is enforced at two bootstrap
    // errors: ballistic or trapped data still sits tens of sigma outside.
    const double allowance = 2.0 * out.loglog_slope_err;
    if (out.loglog_slope > opt.slope_hi + allowance ||
        out.loglog_slope < opt.slope_lo - allowance)
        throw Error(Errc::diffusive_regime_not_reached,
                    "log-log MSD slope " + std::to_string(out.loglog_slope) + " +- " +
                        std::to_string(out.loglog_slope_err) + " outside [" +
                        std::to_string(opt.slope_lo) + ", " + std::to_string(opt.slope_hi) +
                        "]");
    return out;
}

struct Enhancement {
    double xi = 0.0;
    double xi_err = 0.0;
};

/// Relative excess of the resonant diffusion coefficient over the
/// far-off-resonance reference; errors combined in quadrature.
inline Enhancement enhancement(double d, double d_err, double d_ref, double d_ref_err) {
    if (!(d_ref > 0.0))
        throw Error(Errc::zero_reference, "reference diffusion coefficient must be positive");
    Enhancement e;
    e.xi = (d - d_ref) / d_ref;
    const double t1 = d_err / d_ref;
    const double t2 = d * d_ref_err / (d_ref * d_ref);
    e.xi_err = std::sqrt(t1 * t1 + t2 * t2);
    return e;
}

}  // namespace latticemc
