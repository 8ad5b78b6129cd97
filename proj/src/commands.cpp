#include "router/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "router/analysis.hpp"
#include "router/config.hpp"
#include "router/ensemble.hpp"
#include "router/io.hpp"
#include "router/pulses.hpp"
#include "router/rng.hpp"

namespace router {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised when a requested fit cannot produce usable parameters; mapped to
// exit code 3 at the top level.
struct FitFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << body;
    if (body.empty() || body.back() != '\n') out << '\n';
}

json report_header(const RunConfig& cfg) {
    json j;
    j["tool"] = kToolVersion;
    j["config"] = json::parse(cfg.echo_json());
    return j;
}

json fit_block(const std::string& model, const FitResult& fit,
               const std::vector<std::string>& names) {
    return json::parse(fit_report_json(model, fit, names));
}

void require_converged(const FitResult& fit, const std::string& what) {
    if (!fit.converged)
        throw FitFailure(what + ": fit did not converge after " +
                         std::to_string(fit.iterations) + " iterations");
}

std::vector<double> as_vector(const SpectrumTable& tbl, bool reflection) {
    return reflection ? tbl.r_mean : tbl.t_mean;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const RunConfig& cfg, const std::string& control) {
    const auto grid = cfg.grid();
    const std::string echo = cfg.echo_json();
    std::vector<SvgSeries> series;

    std::optional<SpectrumTable> on, off;
    if (control == "both") {
        auto [s_on, s_off] = spectrum_pair(cfg.atom_on(), cfg.atom_off,
                                           cfg.lattice, grid, cfg.n_realizations,
                                           cfg.seed, cfg.workers);
        on = std::move(s_on);
        off = std::move(s_off);
    } else if (control == "on") {
        on = average_spectrum(cfg.atom_on(), cfg.lattice, grid,
                              cfg.n_realizations, cfg.seed, cfg.workers);
    } else {
        off = average_spectrum(cfg.atom_off, cfg.lattice, grid,
                               cfg.n_realizations, cfg.seed, cfg.workers);
    }

    if (off) {
        write_spectrum_csv(out_path(cfg, "spectrum_off.csv"), *off, echo);
        series.push_back({"R (control off)", "#1f77b4", grid, as_vector(*off, true)});
        series.push_back({"T (control off)", "#aec7e8", grid, as_vector(*off, false)});
    }
    if (on) {
        write_spectrum_csv(out_path(cfg, "spectrum_on.csv"), *on, echo);
        series.push_back({"R (control on)", "#d62728", grid, as_vector(*on, true)});
        series.push_back({"T (control on)", "#ff9896", grid, as_vector(*on, false)});
    }
    write_svg_plot(out_path(cfg, "spectrum.svg"),
                   "Ensemble-averaged reflection and transmission",
                   "probe detuning (MHz)", "probability", series);
    return 0;
}

// ---------------------------------------------------------------------------
// switching

int cmd_switching(const RunConfig& cfg, std::optional<double> detuning,
                  std::vector<double> energies) {
    if (energies.empty()) energies = cfg.energies_fj;
    const double delta_i = detuning.value_or(cfg.switching_delta_i_mhz);
    const std::string echo = cfg.echo_json();

    const SwitchingCurve curve =
        switching_curve(cfg.atom_off, cfg.lattice, delta_i, energies,
                        cfg.calibration, cfg.n_realizations, cfg.seed,
                        cfg.workers);
    write_switching_csv(out_path(cfg, "switching.csv"), curve, echo);
    write_svg_plot(out_path(cfg, "switching.svg"),
                   "Port probabilities vs control pulse energy",
                   "control pulse energy (fJ)", "probability",
                   {{"R", "#1f77b4", curve.energies_fj, curve.r},
                    {"T", "#d62728", curve.energies_fj, curve.t}});

    json rep = report_header(cfg);
    rep["delta_i_mhz"] = delta_i;
    try {
        const ExponentialFit fit = exponential_fit(curve);
        require_converged(fit.fit_r, "reflection decay");
        require_converged(fit.fit_t, "transmission rise");
        rep["e_r_fj"] = {{"value", fit.e_r}, {"sigma", fit.e_r_sigma}};
        rep["e_t_fj"] = {{"value", fit.e_t}, {"sigma", fit.e_t_sigma}};
        rep["reflection"] = fit_block("R(E) = R0 exp(-E/E_R) + c", fit.fit_r,
                                      {"r0", "e_r_fj", "c"});
        rep["transmission"] = fit_block("T(E) = Tinf (1 - exp(-E/E_T)) + c",
                                        fit.fit_t, {"tinf", "e_t_fj", "c"});
    } catch (const std::exception& e) {
        rep["error"] = e.what();
        write_text(out_path(cfg, "switching_fit.json"), rep.dump(2));
        std::cerr << "switching: fit failure: " << e.what() << "\n";
        return 3;
    }
    write_text(out_path(cfg, "switching_fit.json"), rep.dump(2));
    return 0;
}

// ---------------------------------------------------------------------------
// extinction

int cmd_extinction(const RunConfig& cfg) {
    const auto grid = cfg.grid();
    const std::string echo = cfg.echo_json();
    const auto [on, off] = spectrum_pair(cfg.atom_on(), cfg.atom_off,
                                         cfg.lattice, grid, cfg.n_realizations,
                                         cfg.seed, cfg.workers);
    const ExtinctionCurve refl =
        extinction_ratio(off, on, Port::reflection, cfg.er_floor);
    const ExtinctionCurve trans =
        extinction_ratio(off, on, Port::transmission, cfg.er_floor);
    write_extinction_csv(out_path(cfg, "extinction.csv"), refl, trans, echo);
    write_svg_plot(out_path(cfg, "extinction.svg"),
                   "Port extinction ratio, control on vs off",
                   "probe detuning (MHz)", "extinction (dB)",
                   {{"reflection", "#1f77b4", refl.grid, refl.ratio_db},
                    {"transmission", "#d62728", trans.grid, trans.ratio_db}});

    json rep = report_header(cfg);
    try {
        const LorentzianFit fit = lorentzian_fit(refl);
        require_converged(fit.fit, "reflection extinction");
        rep["center_mhz"] = fit.center;
        rep["peak_db"] = fit.peak;
        rep["fwhm_mhz"] = fit.fwhm;
        rep["bandwidth_3db_mhz"] = fit.bandwidth_3db;
        rep["reflection"] = fit_block("a + b / (1 + ((x - x0) / (w/2))^2)",
                                      fit.fit, {"baseline_db", "amplitude_db",
                                                "center_mhz", "fwhm_mhz"});
    } catch (const std::exception& e) {
        rep["error"] = e.what();
        write_text(out_path(cfg, "extinction_fit.json"), rep.dump(2));
        std::cerr << "extinction: fit failure: " << e.what() << "\n";
        return 3;
    }
    write_text(out_path(cfg, "extinction_fit.json"), rep.dump(2));
    return 0;
}

// ---------------------------------------------------------------------------
// pulse

int cmd_pulse(const RunConfig& cfg, int shots) {
    const std::string echo = cfg.echo_json();
    PulseResult off = propagate_pulse(cfg.atom_off, cfg.lattice, cfg.pulse,
                                      cfg.n_realizations, cfg.seed, cfg.workers);
    PulseResult on = propagate_pulse(cfg.atom_on(), cfg.lattice, cfg.pulse,
                                     cfg.n_realizations, cfg.seed, cfg.workers);
    if (shots > 0) {
        off = detect(std::move(off), shots, cfg.det_efficiency,
                     child_seed(cfg.seed, 1001));
        on = detect(std::move(on), shots, cfg.det_efficiency,
                    child_seed(cfg.seed, 1002));
    }
    write_pulse_csv(out_path(cfg, "pulse_off.csv"), off, echo);
    write_pulse_csv(out_path(cfg, "pulse_on.csv"), on, echo);
    write_svg_plot(out_path(cfg, "pulse.svg"),
                   "Routed pulse envelopes (mean photons per bin)",
                   "time (ns)", "mean photons / bin",
                   {{"R, control off", "#1f77b4", off.time_ns, off.refl_env},
                    {"T, control off", "#aec7e8", off.time_ns, off.trans_env},
                    {"R, control on", "#d62728", on.time_ns, on.refl_env},
                    {"T, control on", "#ff9896", on.time_ns, on.trans_env}});

    json rep = report_header(cfg);
    rep["n_shots"] = shots;
    rep["det_efficiency"] = cfg.det_efficiency;
    rep["off"] = {{"reflection", off.refl_prob}, {"transmission", off.trans_prob}};
    rep["on"] = {{"reflection", on.refl_prob}, {"transmission", on.trans_prob}};
    rep["off_coherent"] = {{"reflection", off.refl_prob_coherent},
                           {"transmission", off.trans_prob_coherent}};
    rep["on_coherent"] = {{"reflection", on.refl_prob_coherent},
                          {"transmission", on.trans_prob_coherent}};
    write_text(out_path(cfg, "truth_table.json"), rep.dump(2));
    return 0;
}

// ---------------------------------------------------------------------------
// fit (energy calibration)

// Golden-section minimization of f over [a, b]; f must be unimodal there.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return (a + b) / 2.0;
}

// Coarse log-grid scan followed by golden-section refinement around the best
// grid point.  Returns the minimizing value of the scanned variable.
template <typename F>
double log_line_search(F&& f, double center, double half_decades, double tol) {
    const int n = 41;
    const double lo = std::log(center) - half_decades * M_LN10;
    const double hi = std::log(center) + half_decades * M_LN10;
    int best = 0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double u = lo + (hi - lo) * i / (n - 1);
        const double v = f(std::exp(u));
        if (v < best_f) {
            best_f = v;
            best = i;
        }
    }
    const double step = (hi - lo) / (n - 1);
    const double a = lo + step * std::max(best - 1, 0);
    const double b = lo + step * std::min(best + 1, n - 1);
    const double u =
        golden_min([&](double x) { return f(std::exp(x)); }, a, b, tol);
    return std::exp(u);
}

int cmd_fit(const RunConfig& cfg, const std::string& data_path,
            bool fit_gamma1d) {
    const SwitchingCurve data = read_switching_csv(data_path);

    double kappa = cfg.calibration.kappa;
    double gamma_1d = cfg.atom_off.gamma_1d;
    const auto sse = [&](double k, double g1d) {
        AtomParams base = cfg.atom_off;
        base.gamma_1d = g1d;
        const EnergyCalibration cal{k, cfg.calibration.tau_c};
        const SwitchingCurve sim = switching_curve(
            base, cfg.lattice, cfg.switching_delta_i_mhz, data.energies_fj, cal,
            cfg.n_realizations, cfg.seed, cfg.workers);
        double s = 0.0;
        for (size_t i = 0; i < data.energies_fj.size(); ++i) {
            const double dr = sim.r[i] - data.r[i];
            const double dt = sim.t[i] - data.t[i];
            s += dr * dr + dt * dt;
        }
        return s;
    };

    // The simulated curve is deterministic in (config, seed), so a generated
    // data set has an exact zero of the objective at the generating constants;
    // a log-grid scan plus golden-section refinement pins it down.
    const int rounds = fit_gamma1d ? 3 : 1;
    for (int round = 0; round < rounds; ++round) {
        kappa = log_line_search([&](double k) { return sse(k, gamma_1d); },
                                kappa, 2.0, 1e-10);
        if (fit_gamma1d)
            gamma_1d = log_line_search(
                [&](double g) { return sse(kappa, g); }, gamma_1d, 1.0, 1e-10);
    }
    const double residual = std::sqrt(sse(kappa, gamma_1d));
    if (!std::isfinite(residual))
        throw FitFailure("calibration: objective is not finite at the optimum");

    json rep = report_header(cfg);
    rep["calibration"] = {{"kappa", kappa}, {"tau_c_us", cfg.calibration.tau_c}};
    rep["gamma_1d_mhz"] = gamma_1d;
    rep["gamma_1d_fitted"] = fit_gamma1d;
    rep["residual_norm"] = residual;
    rep["n_points"] = data.energies_fj.size();
    write_text(out_path(cfg, "calibration.json"), rep.dump(2));
    return 0;
}

// ---------------------------------------------------------------------------

int apply_workers_env(int from_config_or_flag, bool flag_given) {
    // Precedence: --workers flag, then ROUTER_WORKERS, then the config file.
    if (flag_given) return from_config_or_flag;
    const char* env = std::getenv("ROUTER_WORKERS");
    if (!env || !*env) return from_config_or_flag;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
        throw ConfigError(std::string("ROUTER_WORKERS: not a valid worker count: '") +
                          env + "'");
    return static_cast<int>(v);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Two-port optical router simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    uint64_t seed = 0;
    int workers = 0;
    std::string out_dir;
    const auto* opt_config =
        app.add_option("--config", config_path, "Run configuration (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
    const auto* opt_seed = app.add_option("--seed", seed, "Master seed override");
    const auto* opt_workers =
        app.add_option("--workers", workers, "Worker thread count (0 = auto)")
            ->check(CLI::NonNegativeNumber);
    const auto* opt_out = app.add_option("--out", out_dir, "Output directory");

    auto* sub_spectrum =
        app.add_subcommand("spectrum", "Disorder-averaged R/T spectra");
    std::string control = "both";
    sub_spectrum->add_option("--control", control, "Control field state")
        ->check(CLI::IsMember({"on", "off", "both"}));

    auto* sub_switching =
        app.add_subcommand("switching", "Port probabilities vs control energy");
    std::optional<double> detuning;
    std::vector<double> energies;
    sub_switching->add_option("--detuning", detuning,
                              "Operating probe detuning (MHz)");
    sub_switching
        ->add_option("--energies", energies, "Control energies (fJ)")
        ->delimiter(',');

    auto* sub_extinction =
        app.add_subcommand("extinction", "On/off extinction-ratio spectrum");

    auto* sub_pulse =
        app.add_subcommand("pulse", "Time-domain pulse routing histograms");
    int shots = -1;
    sub_pulse->add_option("--shots", shots,
                          "Detection shots (0 = envelopes only)");

    auto* sub_fit =
        app.add_subcommand("fit", "Calibrate the energy constant to data");
    std::string data_path;
    sub_fit->add_option("--data", data_path, "Switching curve CSV")
        ->required()
        ->check(CLI::ExistingFile);
    bool fit_gamma1d = false;
    sub_fit->add_flag("--fit-gamma1d", fit_gamma1d,
                      "Also fit the guided-mode emission rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    (void)opt_config;
    try {
        RunConfig cfg = load_config(config_path);
        if (opt_seed->count()) cfg.seed = seed;
        if (opt_workers->count()) cfg.workers = workers;
        if (opt_out->count()) cfg.out_dir = out_dir;
        cfg.workers = apply_workers_env(cfg.workers, opt_workers->count() > 0);

        if (sub_spectrum->parsed()) return cmd_spectrum(cfg, control);
        if (sub_switching->parsed())
            return cmd_switching(cfg, detuning, energies);
        if (sub_extinction->parsed()) return cmd_extinction(cfg);
        if (sub_pulse->parsed())
            return cmd_pulse(cfg, shots < 0 ? cfg.n_shots : shots);
        if (sub_fit->parsed()) return cmd_fit(cfg, data_path, fit_gamma1d);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FitFailure& e) {
        std::cerr << "fit failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("router");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace router
