#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "router/analysis.hpp"
#include "router/lattice.hpp"
#include "router/pulses.hpp"
#include "router/scatter.hpp"

namespace router {

inline constexpr const char* kToolVersion = "router 1.0.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully resolved run configuration.  Loaded from a single JSON file; unknown
// keys are rejected and a handful of physics keys are mandatory so a config
// always states what it simulates.
struct RunConfig {
    AtomParams atom_off;      // omega_c = 0
    double omega_c_on = 0.0;  // control-on Rabi frequency (MHz)

    LatticeConfig lattice;    // phase_per_site resolved from the wavelengths
    double lambda_probe_nm = 852.35;
    double lambda_trap_offset_nm = 0.15;

    int n_realizations = 400;
    double grid_min_mhz = -30.0;
    double grid_max_mhz = 40.0;
    double grid_step_mhz = 0.25;

    PulseSpec pulse;
    int n_shots = 4000;
    double det_efficiency = 1.0;

    EnergyCalibration calibration;

    double switching_delta_i_mhz = 14.0;
    std::vector<double> energies_fj;
    double er_floor = 1e-6;

    uint64_t seed = 1;
    int workers = 0;          // 0 = hardware concurrency
    std::string out_dir = "out";

    AtomParams atom_on() const {
        AtomParams p = atom_off;
        p.omega_c = omega_c_on;
        return p;
    }
    std::vector<double> grid() const;

    // Canonical single-line JSON of the resolved config, embedded in every
    // output file for provenance.
    std::string echo_json() const;
};

// Throws ConfigError with the offending key path and, when the key appears
// in the file, its line number.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace router
