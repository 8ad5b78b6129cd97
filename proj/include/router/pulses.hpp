#pragma once

#include <cstdint>
#include <vector>

#include "router/ensemble.hpp"

namespace router {

enum class PulseShape { gaussian, square };

struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double fwhm_ns = 300.0;      // intensity FWHM (gaussian) / duration (square)
    double delta_i_mhz = 14.7;   // carrier detuning
    double mean_photons = 1.0;

    // Internal frequency grid; span is auto-widened when it cannot hold the
    // pulse spectrum times the required margin.
    int n_freq = 16384;          // power of two
    double span_mhz = 128.0;
    double bin_ns = 20.0;        // output histogram bin

    double duration_us() const { return fwhm_ns * 1e-3; }
    double spectral_fwhm_mhz() const;
    void validate() const;
};

struct PulseResult {
    std::vector<double> time_ns;        // output bin centers
    std::vector<double> refl_env;       // mean photons per bin (coherent avg)
    std::vector<double> trans_env;
    std::vector<uint64_t> refl_counts;  // filled by detect()
    std::vector<uint64_t> trans_counts;
    int n_shots = 0;

    // Total output probabilities.  The incoherent pair uses mean |r|^2,
    // |t|^2 over realizations; the coherent pair integrates the envelopes
    // built from the mean complex amplitudes.
    double refl_prob = 0.0;
    double trans_prob = 0.0;
    double refl_prob_coherent = 0.0;
    double trans_prob_coherent = 0.0;
};

struct TruthTable {
    double r_off = 0.0, t_off = 0.0;  // control off
    double r_on = 0.0, t_on = 0.0;    // control on
};

// Output envelopes per port: inverse DFT of (input spectrum x ensemble-
// averaged r(w) or t(w)).  The control field is static during the pulse.
PulseResult propagate_pulse(const AtomParams& p, const LatticeConfig& cfg,
                            const PulseSpec& pulse, int n_real, uint64_t seed,
                            int workers = 0);

// Per-bin counts drawn Poisson with mean envelope * efficiency * n_shots.
PulseResult detect(PulseResult envelopes, int n_shots, double det_efficiency,
                   uint64_t seed);

TruthTable truth_table(const AtomParams& p_on, const AtomParams& p_off,
                       const LatticeConfig& cfg, const PulseSpec& pulse,
                       int n_real, uint64_t seed, int workers = 0);

}  // namespace router
