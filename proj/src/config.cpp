#include "router/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace router {

namespace {

using nlohmann::json;

int line_of_key(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

int line_of_byte(const std::string& text, size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

[[noreturn]] void fail_key(const std::string& origin, const std::string& text,
                           const std::string& path, const std::string& key,
                           const std::string& reason) {
    std::string msg = origin + ": " + path + ": " + reason;
    if (const int line = line_of_key(text, key))
        msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg);
}

const std::map<std::string, std::set<std::string>> kSchema = {
    {"atom",
     {"gamma_1d_mhz", "gamma_prime_mhz", "delta_c_mhz", "gamma_gs_mhz",
      "omega_c_on_mhz"}},
    {"lattice",
     {"n_atoms_target", "filling", "n_sites", "lambda_probe_nm",
      "lambda_trap_offset_nm", "position_jitter_rms"}},
    {"ensemble",
     {"n_realizations", "grid_min_mhz", "grid_max_mhz", "grid_step_mhz"}},
    {"pulse",
     {"shape", "fwhm_ns", "delta_i_mhz", "mean_photons", "n_freq", "span_mhz",
      "bin_ns", "n_shots", "det_efficiency"}},
    {"calibration", {"kappa", "tau_c_us"}},
    {"analysis", {"switching_delta_i_mhz", "energies_fj", "er_floor"}},
    {"run", {"seed", "workers", "out_dir"}},
};

// Keys a config must state explicitly.
const std::vector<std::pair<std::string, std::string>> kRequired = {
    {"atom", "gamma_1d_mhz"},  {"atom", "gamma_prime_mhz"},
    {"atom", "delta_c_mhz"},   {"atom", "gamma_gs_mhz"},
    {"atom", "omega_c_on_mhz"}, {"lattice", "filling"},
    {"lattice", "n_atoms_target"},
};

class Reader {
  public:
    Reader(const json& root, const std::string& origin, const std::string& text)
        : root_(root), origin_(origin), text_(text) {}

    void check_unknown_keys() const {
        for (const auto& [section, val] : root_.items()) {
            const auto it = kSchema.find(section);
            if (it == kSchema.end())
                fail_key(origin_, text_, section, section, "unknown section");
            if (!val.is_object())
                fail_key(origin_, text_, section, section, "must be an object");
            for (const auto& [key, unused] : val.items()) {
                (void)unused;
                if (!it->second.count(key))
                    fail_key(origin_, text_, section + "." + key, key,
                             "unknown key");
            }
        }
        for (const auto& [section, key] : kRequired) {
            if (!root_.contains(section) || !root_[section].contains(key))
                throw ConfigError(origin_ + ": missing required key " + section +
                                  "." + key);
        }
    }

    template <typename T>
    T get(const std::string& section, const std::string& key, T fallback) const {
        if (!root_.contains(section) || !root_[section].contains(key))
            return fallback;
        try {
            return root_[section][key].get<T>();
        } catch (const json::exception&) {
            fail_key(origin_, text_, section + "." + key, key, "wrong type");
        }
    }

    template <typename T>
    T require(const std::string& section, const std::string& key) const {
        if (!root_.contains(section) || !root_[section].contains(key))
            throw ConfigError(origin_ + ": missing required key " + section +
                              "." + key);
        try {
            return root_[section][key].get<T>();
        } catch (const json::exception&) {
            fail_key(origin_, text_, section + "." + key, key, "wrong type");
        }
    }

  private:
    const json& root_;
    const std::string& origin_;
    const std::string& text_;
};

}  // namespace

std::vector<double> RunConfig::grid() const {
    return make_grid(grid_min_mhz, grid_max_mhz, grid_step_mhz);
}

std::string RunConfig::echo_json() const {
    json j;
    j["atom"] = {{"gamma_1d_mhz", atom_off.gamma_1d},
                 {"gamma_prime_mhz", atom_off.gamma_prime},
                 {"delta_c_mhz", atom_off.delta_c},
                 {"gamma_gs_mhz", atom_off.gamma_gs},
                 {"omega_c_on_mhz", omega_c_on}};
    j["lattice"] = {{"n_atoms_target", lattice.n_atoms_target},
                    {"filling", lattice.filling},
                    {"n_sites", lattice.n_sites},
                    {"lambda_probe_nm", lambda_probe_nm},
                    {"lambda_trap_offset_nm", lambda_trap_offset_nm},
                    {"position_jitter_rms", lattice.position_jitter_rms}};
    j["ensemble"] = {{"n_realizations", n_realizations},
                     {"grid_min_mhz", grid_min_mhz},
                     {"grid_max_mhz", grid_max_mhz},
                     {"grid_step_mhz", grid_step_mhz}};
    j["pulse"] = {{"shape", pulse.shape == PulseShape::gaussian ? "gaussian" : "square"},
                  {"fwhm_ns", pulse.fwhm_ns},
                  {"delta_i_mhz", pulse.delta_i_mhz},
                  {"mean_photons", pulse.mean_photons},
                  {"n_freq", pulse.n_freq},
                  {"span_mhz", pulse.span_mhz},
                  {"bin_ns", pulse.bin_ns},
                  {"n_shots", n_shots},
                  {"det_efficiency", det_efficiency}};
    j["calibration"] = {{"kappa", calibration.kappa},
                        {"tau_c_us", calibration.tau_c}};
    j["analysis"] = {{"switching_delta_i_mhz", switching_delta_i_mhz},
                     {"energies_fj", energies_fj},
                     {"er_floor", er_floor}};
    // workers and out_dir are deliberately not echoed: results are
    // worker-count independent by contract and outputs must be byte-identical
    // wherever they are written.
    j["run"] = {{"seed", seed}};
    return j.dump();
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": parse error at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " +
                          e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");

    const Reader r(root, origin, text);
    r.check_unknown_keys();

    RunConfig cfg;
    cfg.atom_off.gamma_1d = r.require<double>("atom", "gamma_1d_mhz");
    cfg.atom_off.gamma_prime = r.require<double>("atom", "gamma_prime_mhz");
    cfg.atom_off.delta_c = r.require<double>("atom", "delta_c_mhz");
    cfg.atom_off.gamma_gs = r.require<double>("atom", "gamma_gs_mhz");
    cfg.atom_off.omega_c = 0.0;
    cfg.omega_c_on = r.require<double>("atom", "omega_c_on_mhz");

    cfg.lattice.n_atoms_target = r.require<int>("lattice", "n_atoms_target");
    cfg.lattice.filling = r.require<double>("lattice", "filling");
    cfg.lattice.n_sites = r.get<int>("lattice", "n_sites", 0);
    cfg.lambda_probe_nm = r.get<double>("lattice", "lambda_probe_nm", 852.35);
    cfg.lambda_trap_offset_nm =
        r.get<double>("lattice", "lambda_trap_offset_nm", 0.15);
    cfg.lattice.position_jitter_rms =
        r.get<double>("lattice", "position_jitter_rms", 0.0);

    cfg.n_realizations = r.get<int>("ensemble", "n_realizations", 400);
    cfg.grid_min_mhz = r.get<double>("ensemble", "grid_min_mhz", -30.0);
    cfg.grid_max_mhz = r.get<double>("ensemble", "grid_max_mhz", 40.0);
    cfg.grid_step_mhz = r.get<double>("ensemble", "grid_step_mhz", 0.25);

    const std::string shape = r.get<std::string>("pulse", "shape", "gaussian");
    if (shape == "gaussian") {
        cfg.pulse.shape = PulseShape::gaussian;
    } else if (shape == "square") {
        cfg.pulse.shape = PulseShape::square;
    } else {
        throw ConfigError(origin + ": pulse.shape must be gaussian or square");
    }
    cfg.pulse.fwhm_ns = r.get<double>("pulse", "fwhm_ns", 300.0);
    cfg.pulse.delta_i_mhz = r.get<double>("pulse", "delta_i_mhz", 14.7);
    cfg.pulse.mean_photons = r.get<double>("pulse", "mean_photons", 1.0);
    cfg.pulse.n_freq = r.get<int>("pulse", "n_freq", 16384);
    cfg.pulse.span_mhz = r.get<double>("pulse", "span_mhz", 128.0);
    cfg.pulse.bin_ns = r.get<double>("pulse", "bin_ns", 20.0);
    cfg.n_shots = r.get<int>("pulse", "n_shots", 4000);
    cfg.det_efficiency = r.get<double>("pulse", "det_efficiency", 1.0);

    cfg.calibration.kappa = r.get<double>("calibration", "kappa", 1.0);
    cfg.calibration.tau_c = r.get<double>("calibration", "tau_c_us", 1.4);

    cfg.switching_delta_i_mhz =
        r.get<double>("analysis", "switching_delta_i_mhz", 14.0);
    cfg.energies_fj = r.get<std::vector<double>>("analysis", "energies_fj",
                                                 make_grid(0.0, 3.0, 0.15));
    cfg.er_floor = r.get<double>("analysis", "er_floor", 1e-6);

    cfg.seed = r.get<uint64_t>("run", "seed", 1);
    cfg.workers = r.get<int>("run", "workers", 0);
    cfg.out_dir = r.get<std::string>("run", "out_dir", "out");

    try {
        cfg.atom_off.validate();
        cfg.lattice.phase_per_site =
            propagation_phase(cfg.lambda_probe_nm,
                              cfg.lambda_probe_nm + cfg.lambda_trap_offset_nm);
        cfg.lattice.validate();
        if (cfg.n_realizations < 1)
            throw std::invalid_argument("ensemble.n_realizations must be >= 1");
        if (cfg.omega_c_on < 0.0)
            throw std::invalid_argument("atom.omega_c_on_mhz must be >= 0");
        if (cfg.det_efficiency < 0.0 || cfg.det_efficiency > 1.0)
            throw std::invalid_argument("pulse.det_efficiency must be in [0, 1]");
        if (!(cfg.calibration.kappa > 0.0) || !(cfg.calibration.tau_c > 0.0))
            throw std::invalid_argument("calibration constants must be > 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace router
