// latticemc — semi-classical Monte-Carlo runs for a dissipative optical
// lattice driven by a weak probe. See README.md for the command and key
// reference.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "latticemc/latticemc.hpp"

namespace fs = std::filesystem;
using namespace latticemc;

namespace {

void usage(FILE* to) {
    std::fprintf(to,
                 "usage: latticemc <command> [--config FILE] [--seed N] [--atoms N] [--tmax T]\n"
                 "                 [--out DIR] [--quiet] [key=value ...]\n"
                 "\n"
                 "commands:\n"
                 "  geometry     derived lattice/probe quantities, no simulation\n"
                 "  single       one ensemble at fixed parameters\n"
                 "  sweep-gamma  scan the pump rate, locate the resonant pump rate\n"
                 "  sweep-delta  scan the probe detuning at fixed pump rate\n"
                 "  bunching     moving-frame density histogram at fixed parameters\n"
                 "  spectrum     probe-detuning scan reduced to spectral line parameters\n"
                 "  sr-scaling   resonance position versus potential depth\n"
                 "\n"
                 "Config files hold one `key = value` per line ('#' comments). Command-line\n"
                 "key=value tokens override file keys. Frequencies and rates are in omega_r\n"
                 "units, lengths in 1/k, times in 1/omega_r; theta_deg is in degrees.\n"
                 "LATTICEMC_THREADS caps worker threads. Exit codes: 0 ok, 2 config error,\n"
                 "3 numerical failure, 4 result guard.\n");
}

struct CliArgs {
    RunSpec spec;
    bool quiet = false;
};

CliArgs parse_cli(int argc, char** argv) {
    CliArgs cli;
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string command;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto need_value = [&](const char* flag) -> std::string {
            if (i + 1 >= argc)
                throw Error(Errc::missing_required, std::string(flag) + " needs a value");
            return argv[++i];
        };
        if (arg == "--help" || arg == "-h") {
            usage(stdout);
            std::exit(0);
        } else if (arg == "--config") {
            config_path = need_value("--config");
        } else if (arg == "--seed") {
            overrides.emplace_back("seed", need_value("--seed"));
        } else if (arg == "--atoms") {
            overrides.emplace_back("atoms", need_value("--atoms"));
        } else if (arg == "--tmax") {
            overrides.emplace_back("tmax", need_value("--tmax"));
        } else if (arg == "--out") {
            overrides.emplace_back("out", need_value("--out"));
        } else if (arg == "--quiet") {
            cli.quiet = true;
        } else if (arg.rfind("--", 0) == 0) {
            throw Error(Errc::unknown_key, "unknown flag '" + arg + "' (see --help)");
        } else if (arg.find('=') != std::string::npos) {
            const auto eq = arg.find('=');
            overrides.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
        } else if (command.empty()) {
            command = arg;
        } else {
            throw Error(Errc::type_mismatch, "unexpected argument '" + arg + "'");
        }
    }
    if (!config_path.empty()) parse_config_text(cli.spec, read_text_file(config_path));
    if (!command.empty()) apply_key(cli.spec, "command", command);
    for (const auto& [k, v] : overrides) apply_key(cli.spec, k, v);
    cli.spec = finish(cli.spec);
    return cli;
}

std::string manifest_text(const RunSpec& spec, std::uint64_t hash, double wall_s) {
    std::string m;
    m += "# latticemc run manifest\n";
    m += std::string("version = ") + kVersion + "\n";
    m += "manifest_hash = " + hash_string(hash) + "\n";
    m += canonical_echo(spec);
    m += "out = " + spec.out_dir + "\n";
    m += "atom_seed_rule = xoshiro256**(point_seed XOR splitmix64(atom_index))\n";
    m += "point_seed_rule = run_seed XOR splitmix64(0x9000000000000000 + point_index)\n";
    if (wall_s >= 0.0) m += "wall_time_s = " + fmt_cell(wall_s) + "\n";
    return m;
}

Table results_table(std::uint64_t hash) {
    Table t;
    t.comments.push_back("manifest = " + hash_string(hash));
    t.header = sweep_row_header();
    return t;
}

void append_row(Table& t, const SweepRow& r) { t.rows.push_back(sweep_row_cells(r)); }

void write_archive(const fs::path& path, const EnsembleResult& run, std::uint64_t hash) {
    std::string out;
    out += "# latticemc trajectory archive\n";
    out += "# manifest = " + hash_string(hash) + "\n";
    out += "# units: t 1/omega_r; x,z 1/k; px,pz hbar*k; s 0=plus,1=minus\n";
    out += "t,x,z,px,pz,s,atom\n";
    for (std::size_t a = 0; a < run.records.size(); ++a) {
        const auto& rec = run.records[a];
        for (std::size_t i = 0; i < rec.size(); ++i) {
            out += fmt_cell(rec.t[i]) + "," + fmt_cell(rec.x[i]) + "," + fmt_cell(rec.z[i]) + "," +
                   fmt_cell(rec.px[i]) + "," + fmt_cell(rec.pz[i]) + "," +
                   std::to_string(static_cast<int>(rec.s[i])) + "," + std::to_string(a) + "\n";
        }
    }
    write_text_file(path, out);
}

int run(const CliArgs& cli) {
    const RunSpec& spec = cli.spec;
    const std::uint64_t hash = fnv1a64(canonical_echo(spec));
    const fs::path out_dir(spec.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create output directory " + out_dir.string());

    Logger log;
    if (!cli.quiet)
        log = [](const std::string& s) { std::fprintf(stderr, "[latticemc] %s\n", s.c_str()); };

    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    auto finish_manifest = [&] {
        write_text_file(out_dir / "manifest.txt", manifest_text(spec, hash, wall()));
    };

    const Command cmd = *spec.command;
    if (cmd == Command::geometry) {
        const LatticeConfig cfg = resolved_lattice(spec);
        const DerivedGeometry g = derive_geometry(cfg);
        Table t;
        t.comments.push_back("manifest = " + hash_string(hash));
        t.header = {"omega_x",  "k_x",      "k_z",        "dk_abs",         "lambda_mod",
                    "v_mod",    "u_plus_x", "u_plus_z",   "delta_brillouin", "sr_prediction"};
        t.rows.push_back({fmt_cell(g.omega_x), fmt_cell(g.k_x), fmt_cell(g.k_z),
                          fmt_cell(g.dk_norm), fmt_cell(g.lambda_mod), fmt_cell(g.v_mod),
                          fmt_cell(g.u_plus.x), fmt_cell(g.u_plus.z),
                          fmt_cell(g.brillouin_detuning), fmt_cell(g.sr_prediction)});
        write_text_file(out_dir / "geometry.csv", render_table(t));
        finish_manifest();
        return 0;
    }

    Table results = results_table(hash);
    const fs::path results_path = out_dir / "results.csv";
    auto flush_results = [&] { write_text_file(results_path, render_table(results)); };

    try {
        switch (cmd) {
            case Command::single:
            case Command::bunching: {
                const LatticeConfig cfg = resolved_lattice(spec);
                PointOptions opt = point_options_from(spec);
                opt.keep_ensemble = spec.archive;
                EnsembleConfig ens = resolved_ensemble(spec);
                const PointResult p = run_point(cfg, ens, opt, log);
                append_row(results, p.row);
                if (cmd == Command::bunching) {
                    if (!p.bunching)
                        throw Error(Errc::probe_off, "bunching needs probe_ratio > 0");
                    const BunchingResult& b = *p.bunching;
                    Table ht;
                    ht.comments.push_back("manifest = " + hash_string(hash));
                    ht.comments.push_back(
                        "A = " + fmt_cell(b.amplitude) + " +- " + fmt_cell(b.amplitude_err) +
                        ", phi = " + fmt_cell(b.phase) + " +- " + fmt_cell(b.phase_err) +
                        ", C = " + fmt_cell(b.c_level) + ", mode = " +
                        (b.mode_sign > 0 ? "+" : "-"));
                    ht.header = {"u", "count", "fit"};
                    const std::size_t nb = b.counts.size();
                    for (std::size_t i = 0; i < nb; ++i) {
                        const double u =
                            (static_cast<double>(i) + 0.5) / static_cast<double>(nb) *
                            b.lambda_mod;
                        const double fit =
                            b.c_level *
                            (1.0 + b.amplitude * std::sin(kTwoPi * u / b.lambda_mod + b.phase));
                        ht.rows.push_back({fmt_cell(u), fmt_cell(b.counts[i]), fmt_cell(fit)});
                    }
                    write_text_file(out_dir / "bunching.csv", render_table(ht));
                }
                if (spec.archive && p.ensemble)
                    write_archive(out_dir / "trajectories.csv", *p.ensemble, hash);
                flush_results();
                break;
            }
            case Command::sweep_gamma:
            case Command::sweep_delta: {
                RowSink sink = [&](const SweepRow& r) {
                    append_row(results, r);
                    flush_results();
                };
                const SweepOutcome out = cmd == Command::sweep_gamma
                                             ? sweep_gamma(spec, log, sink)
                                             : sweep_delta(spec, log, sink);
                if (out.summary) {
                    const PeakSummary& s = *out.summary;
                    results.trailing_comments.push_back(
                        "summary: peak_on=" + s.observable + " position=" +
                        fmt_cell(s.peak.position) + " position_err=" +
                        fmt_cell(s.peak.position_err) + " height=" + fmt_cell(s.peak.height) +
                        " prediction=" + fmt_cell(s.prediction));
                }
                flush_results();
                break;
            }
            case Command::spectrum: {
                const bool has_grid =
                    !spec.gamma0_grid.empty() || !spec.gamma0_grid_relative.empty();
                std::vector<double> gammas = has_grid ? resolved_gamma_grid(spec)
                                                      : std::vector<double>{spec.lattice.pump_rate};
                for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                    const std::uint64_t seed_base = derive_seed(spec.seed, 0xB000000000000000ULL + gi);
                    const SpectrumScan scan = spectrum_scan(spec, gammas[gi], seed_base, log);
                    Table st;
                    st.comments.push_back("manifest = " + hash_string(hash));
                    st.comments.push_back("gamma0 = " + fmt_cell(gammas[gi]));
                    st.comments.push_back(
                        "fit: bg_slope=" + fmt_cell(scan.fit.bg_slope) + " bg_offset=" +
                        fmt_cell(scan.fit.bg_offset) + " A_R=" + fmt_cell(scan.fit.a_raman) +
                        " omega_R=" + fmt_cell(scan.fit.omega_raman) + " sigma_R=" +
                        fmt_cell(scan.fit.sigma_raman) + " A_B=" + fmt_cell(scan.fit.a_brillouin) +
                        " omega_B=" + fmt_cell(scan.fit.omega_brillouin) + " sigma_B=" +
                        fmt_cell(scan.fit.sigma_brillouin) + " converged=" +
                        (scan.fit.converged ? "1" : "0") + " degenerate=" +
                        (scan.fit.degenerate_lines ? "1" : "0"));
                    st.header = {"delta", "S", "S_err", "fit"};
                    for (const auto& pt : scan.points) {
                        std::array<double, 8> pp = {
                            scan.fit.bg_slope,     scan.fit.bg_offset,   scan.fit.a_raman,
                            scan.fit.omega_raman,  scan.fit.sigma_raman, scan.fit.a_brillouin,
                            scan.fit.omega_brillouin, scan.fit.sigma_brillouin};
                        st.rows.push_back({fmt_cell(pt.detuning), fmt_cell(pt.value),
                                           fmt_cell(pt.error),
                                           fmt_cell(detail::spectrum_model(pt.detuning, pp))});
                    }
                    const std::string name =
                        gammas.size() == 1 ? "spectrum.csv"
                                           : "spectrum_g" + std::to_string(gi) + ".csv";
                    write_text_file(out_dir / name, render_table(st));
                    SweepRow row;
                    row.gamma0 = gammas[gi];
                    row.delta0 = spec.lattice.light_shift;
                    row.detuning = kNaN;  // scanned
                    row.probe_ratio = spec.lattice.probe_ratio;
                    row.a_brillouin = scan.fit.a_brillouin;
                    row.a_brillouin_err = scan.fit.covariance_diag[5] > 0.0
                                              ? std::sqrt(scan.fit.covariance_diag[5])
                                              : kNaN;
                    append_row(results, row);
                    flush_results();
                }
                break;
            }
            case Command::sr_scaling: {
                Table t;
                t.comments.push_back("manifest = " + hash_string(hash));
                t.header = {"delta0", "sqrt_delta0", "gamma0_sr", "gamma0_sr_err",
                            "sr_prediction"};
                const fs::path path = out_dir / "results.csv";
                ScalingSink sink = [&](const ScalingRow& r) {
                    t.rows.push_back({fmt_cell(r.light_shift), fmt_cell(r.sqrt_depth),
                                      fmt_cell(r.gamma_sr), fmt_cell(r.gamma_sr_err),
                                      fmt_cell(r.prediction)});
                    write_text_file(path, render_table(t));
                };
                const ScalingOutcome out = sr_scaling(spec, log, sink);
                t.trailing_comments.push_back(
                    "summary: slope=" + fmt_cell(out.summary.slope) + " slope_err=" +
                    fmt_cell(out.summary.slope_err) + " correlation=" +
                    fmt_cell(out.summary.correlation) + " predicted_slope=" +
                    fmt_cell(out.summary.predicted_slope));
                write_text_file(path, render_table(t));
                finish_manifest();
                return 0;
            }
            default:
                break;
        }
    } catch (const Error&) {
        // flush whatever was produced, marked incomplete, then report
        results.trailing_comments.push_back("incomplete");
        flush_results();
        finish_manifest();
        throw;
    }
    finish_manifest();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(stderr);
        return 2;
    }
    try {
        return run(parse_cli(argc, argv));
    } catch (const Error& e) {
        std::fprintf(stderr, "latticemc: error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "latticemc: internal error: %s\n", e.what());
        return 3;
    }
}
