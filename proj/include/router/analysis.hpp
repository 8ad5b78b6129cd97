#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "router/ensemble.hpp"
#include "router/fit.hpp"

namespace router {

enum class Port { reflection, transmission };

struct ExtinctionCurve {
    std::vector<double> grid;           // detunings (MHz)
    std::vector<double> ratio_db;       // NaN where masked
    std::vector<bool> masked;           // denominator below floor
    Port port = Port::reflection;
};

// Control Rabi frequency from pulse energy: omega_c^2 = kappa * E / tau_c.
// kappa bridges experimental energy units to model Rabi units and is the one
// calibrated constant of the toolkit.
struct EnergyCalibration {
    double kappa = 1.0;   // MHz^2 * us / fJ
    double tau_c = 1.4;   // control pulse duration (us)

    double omega_c(double energy_fj) const;
};

struct SwitchingCurve {
    std::vector<double> energies_fj;
    std::vector<double> r;   // reflection at the operating detuning
    std::vector<double> t;
    double delta_i = 0.0;
};

struct LorentzianFit {
    double center = 0.0;     // MHz
    double peak = 0.0;       // dB, value at center (baseline + amplitude)
    double fwhm = 0.0;       // MHz, full width of the Lorentzian itself
    double bandwidth_3db = 0.0;  // MHz, width over which curve > peak - 3 dB
    FitResult fit;           // params: {baseline, amplitude, center, fwhm}
};

struct ExponentialFit {
    double e_r = 0.0, e_r_sigma = 0.0;   // reflection switching energy (fJ)
    double e_t = 0.0, e_t_sigma = 0.0;   // transmission switching energy (fJ)
    FitResult fit_r;   // R(E) = R0 exp(-E/E_R) + c
    FitResult fit_t;   // T(E) = Tinf (1 - exp(-E/E_T)) + c
};

struct BandgapInfo {
    double center = 0.0;        // MHz
    double peak_r = 0.0;
    double width = 0.0;         // MHz at half maximum
    bool boundary_warning = false;
    bool multi_peak = false;
};

// Port contrast in dB between control-off and control-on spectra.
// Points whose denominator is below `floor` are masked, not infinite.
ExtinctionCurve extinction_ratio(const SpectrumTable& off,
                                 const SpectrumTable& on, Port port,
                                 double floor = 1e-6);

LorentzianFit lorentzian_fit(const ExtinctionCurve& curve);

SwitchingCurve switching_curve(const AtomParams& p_base,
                               const LatticeConfig& cfg, double delta_i,
                               const std::vector<double>& energies_fj,
                               const EnergyCalibration& cal, int n_real,
                               uint64_t seed, int workers = 0);

ExponentialFit exponential_fit(const SwitchingCurve& curve);

BandgapInfo find_bandgap(const SpectrumTable& spec);

}  // namespace router
