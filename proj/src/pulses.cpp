#include "router/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "router/fft.hpp"
#include "router/rng.hpp"

namespace router {

namespace {

// Time-bandwidth products for intensity FWHM (transform-limited).
constexpr double kGaussianTbp = 2.0 * M_LN2 / M_PI;  // 0.4413
constexpr double kSquareMainLobe = 0.886;

}  // namespace

double PulseSpec::spectral_fwhm_mhz() const {
    const double tau = duration_us();
    return (shape == PulseShape::gaussian ? kGaussianTbp : kSquareMainLobe) / tau;
}

void PulseSpec::validate() const {
    if (!(fwhm_ns > 0.0)) throw std::invalid_argument("PulseSpec: duration must be > 0");
    if (mean_photons < 0.0) throw std::invalid_argument("PulseSpec: mean_photons >= 0");
    if (!fft::is_pow2(static_cast<size_t>(n_freq)))
        throw std::invalid_argument("PulseSpec: n_freq must be a power of two");
    if (!(span_mhz > 0.0) || !(bin_ns > 0.0))
        throw std::invalid_argument("PulseSpec: span and bin must be > 0");
    const double required = 8.0 * spectral_fwhm_mhz();
    if (span_mhz < required)
        throw std::invalid_argument(
            "PulseSpec: frequency span " + std::to_string(span_mhz) +
            " MHz below required " + std::to_string(required) +
            " MHz (8x pulse spectral FWHM)");
}

PulseResult propagate_pulse(const AtomParams& p, const LatticeConfig& cfg,
                            const PulseSpec& pulse, int n_real, uint64_t seed,
                            int workers) {
    pulse.validate();
    const int n = pulse.n_freq;
    const double df = pulse.span_mhz / n;   // MHz
    const double dt = 1.0 / pulse.span_mhz; // us

    // Baseband field envelope, centered in the time window.
    std::vector<complexd> a(n);
    const double tau = pulse.duration_us();
    for (int j = 0; j < n; ++j) {
        const double t = (j - n / 2) * dt;
        if (pulse.shape == PulseShape::gaussian) {
            a[j] = std::exp(-2.0 * M_LN2 * t * t / (tau * tau));
        } else {
            a[j] = std::abs(t) <= tau / 2.0 ? 1.0 : 0.0;
        }
    }
    double input_energy = 0.0;
    for (const auto& z : a) input_energy += std::norm(z);
    if (input_energy == 0.0)
        throw std::invalid_argument("propagate_pulse: empty input envelope");

    std::vector<complexd> spec = a;
    fft::transform(spec, false);

    // Detuning seen by FFT bin k (fftfreq layout).
    auto bin_freq = [&](int k) {
        const int signed_k = k < n / 2 ? k : k - n;
        return pulse.delta_i_mhz + signed_k * df;
    };
    std::vector<double> grid(n);
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return bin_freq(i) < bin_freq(j); });
    for (int k = 0; k < n; ++k) grid[k] = bin_freq(order[k]);

    const SpectrumTable tbl = average_spectrum(p, cfg, grid, n_real, seed, workers);

    std::vector<complexd> r_amp(n), t_amp(n);
    std::vector<double> r_mean(n), t_mean(n);
    for (int k = 0; k < n; ++k) {
        r_amp[order[k]] = tbl.r_amp[k];
        t_amp[order[k]] = tbl.t_amp[k];
        r_mean[order[k]] = tbl.r_mean[k];
        t_mean[order[k]] = tbl.t_mean[k];
    }

    PulseResult out;
    const double photon_scale = pulse.mean_photons / input_energy;

    // Incoherent totals from the spectral weights.
    double spec_energy = 0.0, num_r = 0.0, num_t = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = std::norm(spec[k]);
        spec_energy += w;
        num_r += r_mean[k] * w;
        num_t += t_mean[k] * w;
    }
    out.refl_prob = pulse.mean_photons * num_r / spec_energy;
    out.trans_prob = pulse.mean_photons * num_t / spec_energy;

    // Coherent envelopes.
    std::vector<complexd> yr(n), yt(n);
    for (int k = 0; k < n; ++k) {
        yr[k] = spec[k] * r_amp[k];
        yt[k] = spec[k] * t_amp[k];
    }
    fft::transform(yr, true);
    fft::transform(yt, true);

    const int per_bin = std::max(1, static_cast<int>(std::llround(pulse.bin_ns / (dt * 1e3))));
    const int n_bins = (n + per_bin - 1) / per_bin;
    out.time_ns.resize(n_bins);
    out.refl_env.assign(n_bins, 0.0);
    out.trans_env.assign(n_bins, 0.0);
    out.refl_counts.assign(n_bins, 0);
    out.trans_counts.assign(n_bins, 0);
    for (int j = 0; j < n; ++j) {
        const int b = j / per_bin;
        out.refl_env[b] += std::norm(yr[j]) * photon_scale;
        out.trans_env[b] += std::norm(yt[j]) * photon_scale;
    }
    for (int b = 0; b < n_bins; ++b) {
        const double t_lo = (b * per_bin - n / 2) * dt;
        out.time_ns[b] = (t_lo + per_bin * dt / 2.0) * 1e3;
        out.refl_prob_coherent += out.refl_env[b];
        out.trans_prob_coherent += out.trans_env[b];
    }
    return out;
}

PulseResult detect(PulseResult envelopes, int n_shots, double det_efficiency,
                   uint64_t seed) {
    if (det_efficiency < 0.0 || det_efficiency > 1.0)
        throw std::invalid_argument("detect: efficiency must be in [0, 1]");
    PulseResult out = std::move(envelopes);
    out.n_shots = n_shots;
    SplitMix64 rng(seed);
    for (size_t b = 0; b < out.refl_env.size(); ++b)
        out.refl_counts[b] =
            rng.next_poisson(out.refl_env[b] * det_efficiency * n_shots);
    for (size_t b = 0; b < out.trans_env.size(); ++b)
        out.trans_counts[b] =
            rng.next_poisson(out.trans_env[b] * det_efficiency * n_shots);
    return out;
}

TruthTable truth_table(const AtomParams& p_on, const AtomParams& p_off,
                       const LatticeConfig& cfg, const PulseSpec& pulse,
                       int n_real, uint64_t seed, int workers) {
    const PulseResult off = propagate_pulse(p_off, cfg, pulse, n_real, seed, workers);
    const PulseResult on = propagate_pulse(p_on, cfg, pulse, n_real, seed, workers);
    return TruthTable{off.refl_prob, off.trans_prob, on.refl_prob, on.trans_prob};
}

}  // namespace router
