#pragma once

#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "latticemc/dynamics.hpp"

// Ensemble preparation and deterministic parallel execution. Trajectories are
// independent: atom i draws from a stream derived from (master_seed, i), runs
// its thermalization and measurement, and writes into slot i. The result is
// bit-identical for any thread count.

namespace latticemc {

struct EnsembleConfig {
    int n_atoms = 500;
    double thermalization_time = -1.0;  ///< < 0: automatic (see below)
    double measurement_time = 2000.0;
    double sampling_interval = 1.0;
    std::uint64_t master_seed = 1;
    double init_temperature = -1.0;     ///< k_B T in hbar omega_r; < 0: |light_shift| / 5

    void check() const {
        if (n_atoms < 1) throw Error(Errc::type_mismatch, "n_atoms must be >= 1");
        if (!(measurement_time > 0.0))
            throw Error(Errc::type_mismatch, "measurement_time must be > 0");
    }
};

struct TrajectoryFailure {
    int atom_index;
    std::uint64_t seed;
    std::string what;
};

/// Per-run bookkeeping kept alongside the records.
struct EnsembleInfo {
    StepControl control;
    double thermalization_time = 0.0;
    double init_temperature = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> atom_seeds;
    std::vector<TrajectoryFailure> failures;
    int threads_used = 1;
};

struct EnsembleResult {
    std::vector<TrajectoryRecord> records;
    EnsembleInfo info;
};

/// Long enough for both the pumping equilibrium (50 mean pumping times,
/// 50 / ((2/3) pump_rate)) and the mechanical one (20 oscillation periods).
inline double default_thermalization_time(const LatticeConfig& cfg, const DerivedGeometry& geom) {
    double t = 0.0;
    if (cfg.pump_rate > 0.0) t = 50.0 / ((2.0 / 3.0) * cfg.pump_rate);
    if (geom.omega_x > 0.0) t = std::max(t, 20.0 * kTwoPi / geom.omega_x);
    return t;
}

/// Positions on randomly chosen minima of the probe-off lower potential
/// (which are dark for atoms in |minus>), sublevel minus, Gaussian momenta
/// with per-axis variance M k_B T.
inline std::vector<AtomState> init_atoms(const LatticeConfig& cfg, const DerivedGeometry& geom,
                                         const EnsembleConfig& ens, Xoshiro256& rng) {
    const double kt = ens.init_temperature >= 0.0 ? ens.init_temperature : -cfg.light_shift / 5.0;
    const double sigma_p = std::sqrt(kAtomMass * kt);
    std::vector<AtomState> atoms;
    atoms.reserve(static_cast<std::size_t>(ens.n_atoms));
    for (int i = 0; i < ens.n_atoms; ++i) {
        // well sites: k_x x = pi j, 2 k_z z = (-1)^j pi/2 + 2 pi m
        const int j = static_cast<int>(rng.next() % 5) - 2;
        const int m = static_cast<int>(rng.next() % 5) - 2;
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        AtomState a;
        a.r.x = kPi * j / geom.k_x;
        a.r.z = (sgn * kPi / 4.0 + kPi * m) / geom.k_z;
        const auto [n1, n2] = rng.normal_pair();
        a.p = Vec2{sigma_p * n1, sigma_p * n2};
        a.s = Sublevel::minus;
        a.t = 0.0;
        atoms.push_back(a);
    }
    return atoms;
}

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LATTICEMC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run the full ensemble. Individual trajectory failures are collected, not
/// fatal, unless they exceed 5% of the ensemble.
inline EnsembleResult run_ensemble(const LatticeConfig& cfg, const DerivedGeometry& geom,
                                   const EnsembleConfig& ens,
                                   std::optional<StepControl> control_override = {},
                                   int max_threads = 0) {
    validate(cfg);
    ens.check();
    const FieldParams fp = make_field_params(cfg, geom);
    const StepControl control = control_override ? *control_override : choose_dt(cfg, geom);
    const double t_therm = ens.thermalization_time >= 0.0 ? ens.thermalization_time
                                                          : default_thermalization_time(cfg, geom);

    EnsembleResult out;
    out.info.control = control;
    out.info.thermalization_time = t_therm;
    out.info.init_temperature =
        ens.init_temperature >= 0.0 ? ens.init_temperature : -cfg.light_shift / 5.0;
    out.info.master_seed = ens.master_seed;
    out.info.atom_seeds.resize(static_cast<std::size_t>(ens.n_atoms));
    out.records.resize(static_cast<std::size_t>(ens.n_atoms));

    // The initial states come from one dedicated stream so that the per-atom
    // streams stay aligned with atom indices.
    Xoshiro256 init_rng = derive_stream(ens.master_seed, 0xFFFFFFFFFFFFFFFFULL);
    const std::vector<AtomState> initial = init_atoms(cfg, geom, ens, init_rng);

    const long long therm_steps =
        t_therm <= 0.0 ? 0 : static_cast<long long>(std::ceil(t_therm / control.dt - 1e-9));

    std::vector<std::optional<TrajectoryFailure>> failures(
        static_cast<std::size_t>(ens.n_atoms));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= ens.n_atoms) return;
            const auto idx = static_cast<std::size_t>(i);
            std::uint64_t sm = static_cast<std::uint64_t>(i);
            const std::uint64_t seed = ens.master_seed ^ splitmix64(sm);
            out.info.atom_seeds[idx] = seed;
            Xoshiro256 rng(seed);
            AtomState a = initial[idx];
            try {
                for (long long k = 0; k < therm_steps; ++k) step(a, control, fp, rng);
                out.records[idx] = simulate_trajectory(a, ens.measurement_time,
                                                       ens.sampling_interval, control, fp, rng);
            } catch (const Error& e) {
                failures[idx] = TrajectoryFailure{i, seed, e.what()};
                out.records[idx] = TrajectoryRecord{};
            }
        }
    };

    const int n_threads = std::min(resolve_thread_count(max_threads), ens.n_atoms);
    out.info.threads_used = n_threads;
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<TrajectoryRecord> healthy;
    healthy.reserve(out.records.size());
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        if (failures[i]) {
            out.info.failures.push_back(*failures[i]);
        } else {
            healthy.push_back(std::move(out.records[i]));
        }
    }
    out.records = std::move(healthy);
    if (out.info.failures.size() * 20 > static_cast<std::size_t>(ens.n_atoms)) {
        std::string msg = "more than 5% of trajectories failed (" +
                          std::to_string(out.info.failures.size()) + "/" +
                          std::to_string(ens.n_atoms) + "); first seed " +
                          std::to_string(out.info.failures.front().seed);
        throw Error(Errc::ensemble_unhealthy, msg);
    }
    return out;
}

}  // namespace latticemc
