#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "latticemc/dynamics.hpp"
#include "latticemc/geometry.hpp"
#include "latticemc/rng.hpp"
#include "latticemc/stats.hpp"

// Moving-frame atomic bunching. Each sample is folded onto the coordinate
//   u = (r . u_mode - v_mod t) mod lambda_mod,
// the frame co-moving with the probe-induced potential modulation of the
// chosen mode, and accumulated into a histogram over [0, lambda_mod). The
// modulation amplitude A and phase phi of
//   N(u) = C [1 + A sin(2 pi u / lambda_mod + phi)]
// follow from the first discrete Fourier coefficient of the bin counts:
//   (2 / (B C)) sum_b n_b exp(-2 pi i u_b / lambda_mod) = A exp(i (phi - pi/2)).

namespace latticemc {

struct BunchingOptions {
    int bins = 64;
    int mode_sign = +1;            ///< +1: fold along u_plus, -1: along u_minus
    bool average_modes = false;    ///< accumulate both mirror folds (halves the variance)
    int bootstrap_rounds = 200;
    std::uint64_t bootstrap_seed = 0xC6A4A7935BD1E995ULL;
};

struct BunchingResult {
    std::vector<double> counts;    ///< per-bin sample counts
    double c_level = 0.0;          ///< mean bin count C
    double amplitude = 0.0;        ///< A >= 0
    double amplitude_err = 0.0;
    double phase = 0.0;            ///< phi in (-pi, pi]
    double phase_err = 0.0;
    double quadrature = 0.0;       ///< A sin(phi), the spectrum estimator input
    double quadrature_err = 0.0;
    int mode_sign = +1;
    double lambda_mod = 0.0;
    long long n_samples = 0;
};

namespace detail {

struct Harmonic {
    double a;
    double phi;
};

inline Harmonic first_harmonic(std::span<const double> counts) {
    const std::size_t b = counts.size();
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 0.0) return {0.0, 0.0};
    const double c_level = total / static_cast<double>(b);
    std::complex<double> zsum = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const double angle = -kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(b);
        zsum += counts[i] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    const std::complex<double> val = 2.0 / (static_cast<double>(b) * c_level) * zsum;
    Harmonic h;
    h.a = std::abs(val);
    h.phi = std::arg(val) + kPi / 2.0;
    if (h.phi > kPi) h.phi -= kTwoPi;
    return h;
}

}  // namespace detail

inline BunchingResult bunching_histogram(std::span<const TrajectoryRecord> records,
                                         const LatticeConfig& cfg, const DerivedGeometry& geom,
                                         const BunchingOptions& opt = {}) {
    if (!(cfg.probe_ratio > 0.0))
        throw Error(Errc::probe_off, "bunching needs the probe on (probe_ratio > 0)");
    const std::size_t n_bins = static_cast<std::size_t>(opt.bins);
    const double lambda = geom.lambda_mod;
    const double v_mod = geom.v_mod;

    // per-atom histograms so the uncertainty can be bootstrapped over atoms
    const std::size_t n_atoms = records.size();
    std::vector<double> per_atom(n_atoms * n_bins, 0.0);
    long long n_samples = 0;
    for (std::size_t a = 0; a < n_atoms; ++a) {
        const auto& rec = records[a];
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const Vec2 r{rec.x[i], rec.z[i]};
            for (int pass = 0; pass < (opt.average_modes ? 2 : 1); ++pass) {
                const int sign = pass == 0 ? opt.mode_sign : -opt.mode_sign;
                const Vec2& u_dir = sign > 0 ? geom.u_plus : geom.u_minus;
                const double w = dot(u_dir, r) - v_mod * rec.t[i];
                const double u = positive_mod(w, lambda);
                auto bin = static_cast<std::size_t>(u / lambda * static_cast<double>(n_bins));
                if (bin >= n_bins) bin = n_bins - 1;
                per_atom[a * n_bins + bin] += 1.0;
                ++n_samples;
            }
        }
    }
    if (n_samples == 0) throw Error(Errc::empty_records, "bunching: no samples to accumulate");

    BunchingResult out;
    out.mode_sign = opt.mode_sign;
    out.lambda_mod = lambda;
    out.n_samples = n_samples;
    out.counts.assign(n_bins, 0.0);
    for (std::size_t a = 0; a < n_atoms; ++a)
        for (std::size_t b = 0; b < n_bins; ++b) out.counts[b] += per_atom[a * n_bins + b];
    out.c_level = static_cast<double>(n_samples) / static_cast<double>(n_bins);
    const detail::Harmonic h = detail::first_harmonic(out.counts);
    out.amplitude = h.a;
    out.phase = h.phi;
    out.quadrature = h.a * std::sin(h.phi);

    // bootstrap over atoms; phases averaged circularly around the estimate
    if (n_atoms > 1 && opt.bootstrap_rounds > 0) {
        Xoshiro256 rng(opt.bootstrap_seed);
        std::vector<double> ba, bphi, bq;
        std::vector<double> counts(n_bins);
        for (int round = 0; round < opt.bootstrap_rounds; ++round) {
            std::fill(counts.begin(), counts.end(), 0.0);
            for (std::size_t a = 0; a < n_atoms; ++a) {
                const std::size_t pick = static_cast<std::size_t>(rng.next() % n_atoms);
                for (std::size_t b = 0; b < n_bins; ++b) counts[b] += per_atom[pick * n_bins + b];
            }
            const detail::Harmonic hb = detail::first_harmonic(counts);
            ba.push_back(hb.a);
            double dphi = hb.phi - h.phi;
            if (dphi > kPi) dphi -= kTwoPi;
            if (dphi < -kPi) dphi += kTwoPi;
            bphi.push_back(dphi);
            bq.push_back(hb.a * std::sin(hb.phi));
        }
        out.amplitude_err = std::sqrt(variance(ba));
        out.phase_err = std::sqrt(variance(bphi));
        out.quadrature_err = std::sqrt(variance(bq));
    }
    return out;
}

}  // namespace latticemc
