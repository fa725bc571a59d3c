#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "latticemc/io.hpp"
#include "latticemc/observables/bunching.hpp"
#include "latticemc/observables/diffusion.hpp"
#include "latticemc/observables/kinetic.hpp"
#include "latticemc/observables/peak.hpp"
#include "latticemc/observables/spectrum.hpp"
#include "latticemc/runspec.hpp"

// Sweep orchestration on top of the ensemble runner. Every sweep point gets
// its own seed derived from the run seed, so grids can be recomputed or
// reordered without touching other points, and rows come out identical for
// any thread count.

namespace latticemc {

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t sm = tag;
    return base ^ splitmix64(sm);
}

namespace seed_tags {
inline constexpr std::uint64_t point = 0x9000000000000000ULL;      // + point index
inline constexpr std::uint64_t reference = 0x9100000000000000ULL;  // reference run of a point
inline constexpr std::uint64_t depth = 0xA000000000000000ULL;      // + depth index (sr-scaling)
}  // namespace seed_tags

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One aggregated observation row (columns in this order in every table).
struct SweepRow {
    double gamma0 = kNaN, delta0 = kNaN, detuning = kNaN, probe_ratio = kNaN;
    double d_x = kNaN, d_x_err = kNaN;
    double d_z = kNaN, d_z_err = kNaN;
    double xi = kNaN, xi_err = kNaN;
    double a_mod = kNaN, a_mod_err = kNaN;
    double phi = kNaN, phi_err = kNaN;
    double a_brillouin = kNaN, a_brillouin_err = kNaN;
    double e_kin = kNaN, e_kin_err = kNaN;
};

inline const std::vector<std::string>& sweep_row_header() {
    static const std::vector<std::string> h = {
        "gamma0", "delta0", "delta", "probe_ratio", "D_x", "D_x_err", "D_z", "D_z_err",
        "xi",     "xi_err", "A",     "A_err",       "phi", "phi_err", "A_B", "A_B_err",
        "E_K",    "E_K_err"};
    return h;
}

inline std::vector<std::string> sweep_row_cells(const SweepRow& r) {
    return {fmt_cell(r.gamma0),     fmt_cell(r.delta0),         fmt_cell(r.detuning),
            fmt_cell(r.probe_ratio), fmt_cell(r.d_x),           fmt_cell(r.d_x_err),
            fmt_cell(r.d_z),        fmt_cell(r.d_z_err),        fmt_cell(r.xi),
            fmt_cell(r.xi_err),     fmt_cell(r.a_mod),          fmt_cell(r.a_mod_err),
            fmt_cell(r.phi),        fmt_cell(r.phi_err),        fmt_cell(r.a_brillouin),
            fmt_cell(r.a_brillouin_err), fmt_cell(r.e_kin),     fmt_cell(r.e_kin_err)};
}

inline SweepRow sweep_row_from_cells(const std::vector<std::string>& c) {
    auto d = [&](std::size_t i) { return std::strtod(c.at(i).c_str(), nullptr); };
    SweepRow r;
    r.gamma0 = d(0); r.delta0 = d(1); r.detuning = d(2); r.probe_ratio = d(3);
    r.d_x = d(4); r.d_x_err = d(5); r.d_z = d(6); r.d_z_err = d(7);
    r.xi = d(8); r.xi_err = d(9); r.a_mod = d(10); r.a_mod_err = d(11);
    r.phi = d(12); r.phi_err = d(13); r.a_brillouin = d(14); r.a_brillouin_err = d(15);
    r.e_kin = d(16); r.e_kin_err = d(17);
    return r;
}

using Logger = std::function<void(const std::string&)>;

struct PointOptions {
    bool compute_xi = false;
    double reference_delta_factor = 100.0;
    bool reference_probe_on = true;
    double noise_scale = 1.0;
    bool jump_recoil = true;
    BunchingOptions bunching{};
    int max_threads = 0;
    bool keep_ensemble = false;  ///< keep the trajectory records in the result
};

inline PointOptions point_options_from(const RunSpec& spec) {
    PointOptions o;
    o.compute_xi = resolved_compute_xi(spec);
    o.reference_delta_factor = spec.reference_delta_factor;
    o.reference_probe_on = spec.reference_probe_on;
    o.noise_scale = spec.noise_scale;
    o.jump_recoil = spec.jump_recoil;
    o.bunching.bins = spec.bins;
    o.bunching.mode_sign = spec.mode_sign;
    o.bunching.average_modes = spec.average_modes;
    return o;
}

struct PointResult {
    SweepRow row;
    std::optional<BunchingResult> bunching;
    std::optional<EnsembleResult> ensemble;  ///< only when keep_ensemble

    // reference-run bookkeeping (when xi was computed)
    double d_x_reference = kNaN;
    double d_x_reference_err = kNaN;
};

/// Run one parameter point: ensemble, diffusion along both axes, kinetic
/// energy, moving-frame bunching (probe on), and optionally the enhancement
/// factor against a far-off-resonance reference run.
inline PointResult run_point(const LatticeConfig& cfg_in, const EnsembleConfig& ens,
                             const PointOptions& opt, Logger log = {}) {
    const LatticeConfig cfg = validate(cfg_in);
    const DerivedGeometry geom = derive_geometry(cfg);

    StepControl control = choose_dt(cfg, geom);
    control.noise_scale = opt.noise_scale;
    control.jump_recoil = opt.jump_recoil;

    PointResult out;
    out.row.gamma0 = cfg.pump_rate;
    out.row.delta0 = cfg.light_shift;
    out.row.detuning = cfg.probe_detuning;
    out.row.probe_ratio = cfg.probe_ratio;

    EnsembleResult run = run_ensemble(cfg, geom, ens, control, opt.max_threads);
    if (log)
        log("ensemble done: gamma0=" + fmt_cell(cfg.pump_rate) + " delta=" +
            fmt_cell(cfg.probe_detuning) + " atoms=" + std::to_string(run.records.size()));

    const DiffusionResult dx = msd_diffusion(run.records, Axis::x);
    const DiffusionResult dz = msd_diffusion(run.records, Axis::z);
    out.row.d_x = dx.d;
    out.row.d_x_err = dx.d_err;
    out.row.d_z = dz.d;
    out.row.d_z_err = dz.d_err;

    const KineticEnergy ek = kinetic_energy(run.records);
    out.row.e_kin = ek.value;
    out.row.e_kin_err = ek.error;

    if (cfg.probe_ratio > 0.0) {
        BunchingResult b = bunching_histogram(run.records, cfg, geom, opt.bunching);
        out.row.a_mod = b.amplitude;
        out.row.a_mod_err = b.amplitude_err;
        out.row.phi = b.phase;
        out.row.phi_err = b.phase_err;
        out.bunching = std::move(b);
    }

    if (opt.compute_xi) {
        LatticeConfig ref = cfg;
        ref.probe_detuning = opt.reference_delta_factor * geom.omega_x;
        if (!opt.reference_probe_on) ref.probe_ratio = 0.0;
        const DerivedGeometry ref_geom = derive_geometry(ref);
        StepControl ref_control = choose_dt(ref, ref_geom);
        ref_control.noise_scale = opt.noise_scale;
        ref_control.jump_recoil = opt.jump_recoil;
        EnsembleConfig ref_ens = ens;
        ref_ens.master_seed = derive_seed(ens.master_seed, seed_tags::reference);
        EnsembleResult ref_run = run_ensemble(ref, ref_geom, ref_ens, ref_control, opt.max_threads);
        const DiffusionResult dref = msd_diffusion(ref_run.records, Axis::x);
        out.d_x_reference = dref.d;
        out.d_x_reference_err = dref.d_err;
        const Enhancement e = enhancement(dx.d, dx.d_err, dref.d, dref.d_err);
        out.row.xi = e.xi;
        out.row.xi_err = e.xi_err;
        if (log) log("reference done: D_x0=" + fmt_cell(dref.d) + " xi=" + fmt_cell(e.xi));
    }

    if (opt.keep_ensemble) out.ensemble = std::move(run);
    return out;
}

using RowSink = std::function<void(const SweepRow&)>;

struct PeakSummary {
    PeakLocation peak;
    double prediction = kNaN;      ///< closed-form synchronization estimate
    std::string observable;        ///< which column the peak was located on
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    std::optional<PeakSummary> summary;
};

/// Pump-rate sweep at fixed depth/probe; locates the resonance on xi when
/// computed, otherwise on D_x.
inline SweepOutcome sweep_gamma(const RunSpec& spec, Logger log = {}, RowSink sink = {},
                                int max_threads = 0) {
    const std::vector<double> grid = resolved_gamma_grid(spec);
    if (grid.empty()) throw Error(Errc::missing_required, "sweep-gamma: empty gamma0 grid");
    PointOptions opt = point_options_from(spec);
    opt.max_threads = max_threads;
    SweepOutcome out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LatticeConfig cfg = resolved_lattice(spec);
        cfg.pump_rate = grid[i];
        EnsembleConfig ens = resolved_ensemble(spec);
        ens.master_seed = derive_seed(spec.seed, seed_tags::point + i);
        if (log) log("sweep-gamma point " + std::to_string(i + 1) + "/" +
                     std::to_string(grid.size()));
        PointResult p = run_point(cfg, ens, opt, log);
        out.rows.push_back(p.row);
        if (sink) sink(p.row);
    }
    const bool use_xi = opt.compute_xi;
    std::vector<CurvePoint> curve;
    for (const auto& r : out.rows)
        curve.push_back({r.gamma0, use_xi ? r.xi : r.d_x, use_xi ? r.xi_err : r.d_x_err});
    PeakSummary s;
    s.prediction = predict_sr(spec.lattice);
    s.observable = use_xi ? "xi" : "D_x";
    s.peak = locate_peak(curve);  // throws no_interior_maximum when the bell is absent
    out.summary = s;
    return out;
}

/// Probe-detuning sweep at fixed pump rate; the diffusion reference is shared
/// across the grid (it does not depend on the scanned detuning).
inline SweepOutcome sweep_delta(const RunSpec& spec, Logger log = {}, RowSink sink = {},
                                int max_threads = 0) {
    const std::vector<double> grid = resolved_delta_grid(spec);
    if (grid.empty()) throw Error(Errc::missing_required, "sweep-delta: empty delta grid");
    PointOptions opt = point_options_from(spec);
    opt.max_threads = max_threads;
    const bool want_xi = opt.compute_xi;
    opt.compute_xi = false;  // the shared reference below replaces per-point references

    double d_ref = kNaN, d_ref_err = kNaN;
    if (want_xi) {
        LatticeConfig ref = resolved_lattice(spec);
        const DerivedGeometry geom = derive_geometry(ref);
        ref.probe_detuning = spec.reference_delta_factor * geom.omega_x;
        if (!spec.reference_probe_on) ref.probe_ratio = 0.0;
        StepControl control = choose_dt(ref, derive_geometry(ref));
        control.noise_scale = opt.noise_scale;
        control.jump_recoil = opt.jump_recoil;
        EnsembleConfig ens = resolved_ensemble(spec);
        ens.master_seed = derive_seed(spec.seed, seed_tags::reference);
        if (log) log("sweep-delta reference run");
        EnsembleResult ref_run =
            run_ensemble(ref, derive_geometry(ref), ens, control, max_threads);
        const DiffusionResult dref = msd_diffusion(ref_run.records, Axis::x);
        d_ref = dref.d;
        d_ref_err = dref.d_err;
    }

    SweepOutcome out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LatticeConfig cfg = resolved_lattice(spec);
        cfg.probe_detuning = grid[i];
        EnsembleConfig ens = resolved_ensemble(spec);
        ens.master_seed = derive_seed(spec.seed, seed_tags::point + i);
        if (log) log("sweep-delta point " + std::to_string(i + 1) + "/" +
                     std::to_string(grid.size()));
        PointResult p = run_point(cfg, ens, opt, log);
        if (want_xi) {
            const Enhancement e = enhancement(p.row.d_x, p.row.d_x_err, d_ref, d_ref_err);
            p.row.xi = e.xi;
            p.row.xi_err = e.xi_err;
        }
        out.rows.push_back(p.row);
        if (sink) sink(p.row);
    }
    std::vector<CurvePoint> curve;
    for (const auto& r : out.rows)
        curve.push_back({r.detuning, want_xi ? r.xi : r.d_x, want_xi ? r.xi_err : r.d_x_err});
    PeakSummary s;
    s.prediction = derive_geometry(spec.lattice).omega_x;
    s.observable = want_xi ? "xi" : "D_x";
    s.peak = locate_peak(curve);
    out.summary = s;
    return out;
}

struct SpectrumScan {
    std::vector<SpectrumPoint> points;
    SpectrumFit fit;
};

/// Scan the probe detuning and fit the line model; `seed_base` separates the
/// per-detuning ensembles of different pump rates.
inline SpectrumScan spectrum_scan(const RunSpec& spec, double pump_rate,
                                  std::uint64_t seed_base, Logger log = {},
                                  int max_threads = 0) {
    const std::vector<double> grid = resolved_delta_grid(spec);
    SpectrumScan out;
    SpectrumPointOptions po;
    po.bunching.bins = spec.bins;
    po.bunching.mode_sign = spec.mode_sign;
    po.bunching.average_modes = spec.average_modes;
    po.max_threads = max_threads;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LatticeConfig cfg = resolved_lattice(spec);
        cfg.pump_rate = pump_rate;
        cfg.probe_detuning = grid[i];
        const DerivedGeometry geom = derive_geometry(cfg);
        StepControl control = choose_dt(cfg, geom);
        control.noise_scale = spec.noise_scale;
        control.jump_recoil = spec.jump_recoil;
        po.control_override = control;
        EnsembleConfig ens = resolved_ensemble(spec);
        ens.master_seed = derive_seed(seed_base, seed_tags::point + i);
        if (log) log("spectrum point " + std::to_string(i + 1) + "/" + std::to_string(grid.size()) +
                     " (delta=" + fmt_cell(grid[i]) + ")");
        out.points.push_back(spectrum_point(cfg, geom, ens, po));
    }
    out.fit = fit_spectrum(out.points, derive_geometry(spec.lattice).omega_x);
    return out;
}

struct ScalingRow {
    double light_shift = kNaN;
    double sqrt_depth = kNaN;      ///< sqrt(|delta0|) in sqrt(omega_r)
    double gamma_sr = kNaN;
    double gamma_sr_err = kNaN;
    double prediction = kNaN;
};

struct ScalingSummary {
    double slope = kNaN;           ///< weighted through-origin slope of gamma_sr vs sqrt_depth
    double slope_err = kNaN;
    double correlation = kNaN;
    double predicted_slope = kNaN;
};

struct ScalingOutcome {
    std::vector<ScalingRow> rows;
    ScalingSummary summary;
};

using ScalingSink = std::function<void(const ScalingRow&)>;

/// Locate the resonance for every potential depth and fit the scaling law.
inline ScalingOutcome sr_scaling(const RunSpec& spec, Logger log = {}, ScalingSink sink = {},
                                 int max_threads = 0) {
    ScalingOutcome out;
    for (std::size_t i = 0; i < spec.delta0_grid.size(); ++i) {
        RunSpec sub = spec;
        sub.command = Command::sweep_gamma;
        sub.lattice.light_shift = spec.delta0_grid[i];
        sub.detuning.reset();  // retune to the Brillouin condition of this depth
        sub.seed = derive_seed(spec.seed, seed_tags::depth + i);
        if (log) log("sr-scaling depth " + fmt_cell(sub.lattice.light_shift));
        const SweepOutcome sweep = sweep_gamma(sub, log, {}, max_threads);
        ScalingRow row;
        row.light_shift = sub.lattice.light_shift;
        row.sqrt_depth = std::sqrt(-sub.lattice.light_shift);
        row.gamma_sr = sweep.summary->peak.position;
        row.gamma_sr_err = sweep.summary->peak.position_err;
        row.prediction = sweep.summary->prediction;
        out.rows.push_back(row);
        if (sink) sink(row);
    }
    double swxy = 0.0, swxx = 0.0;
    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
        const double w = r.gamma_sr_err > 0.0 ? 1.0 / (r.gamma_sr_err * r.gamma_sr_err) : 1.0;
        swxy += w * r.sqrt_depth * r.gamma_sr;
        swxx += w * r.sqrt_depth * r.sqrt_depth;
        xs.push_back(r.sqrt_depth);
        ys.push_back(r.gamma_sr);
    }
    out.summary.slope = swxy / swxx;
    out.summary.slope_err = 1.0 / std::sqrt(swxx);
    out.summary.correlation = pearson_correlation(xs, ys);
    out.summary.predicted_slope = 9.0 * std::sin(spec.lattice.half_angle) / (kPi * 1.5);
    return out;
}

}  // namespace latticemc
