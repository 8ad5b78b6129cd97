#include "router/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace router {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void lorentzian_model(double x, const std::vector<double>& p, double& f,
                      std::vector<double>& jac) {
    // p = {baseline a, amplitude b, center x0, fwhm w}
    const double hw = p[3] / 2.0;
    const double u = (x - p[2]) / hw;
    const double den = 1.0 + u * u;
    f = p[0] + p[1] / den;
    jac[0] = 1.0;
    jac[1] = 1.0 / den;
    jac[2] = p[1] * 2.0 * u / (hw * den * den);
    jac[3] = p[1] * u * u * 2.0 / (p[3] * den * den);
}

void exp_decay_model(double x, const std::vector<double>& p, double& f,
                     std::vector<double>& jac) {
    // p = {R0, E_R, c}
    const double e = std::exp(-x / p[1]);
    f = p[0] * e + p[2];
    jac[0] = e;
    jac[1] = p[0] * e * x / (p[1] * p[1]);
    jac[2] = 1.0;
}

void exp_rise_model(double x, const std::vector<double>& p, double& f,
                    std::vector<double>& jac) {
    // p = {Tinf, E_T, c}
    const double e = std::exp(-x / p[1]);
    f = p[0] * (1.0 - e) + p[2];
    jac[0] = 1.0 - e;
    jac[1] = -p[0] * e * x / (p[1] * p[1]);
    jac[2] = 1.0;
}

}  // namespace

double EnergyCalibration::omega_c(double energy_fj) const {
    if (energy_fj < 0.0)
        throw std::invalid_argument("EnergyCalibration: energy must be >= 0");
    return std::sqrt(kappa * energy_fj / tau_c);
}

ExtinctionCurve extinction_ratio(const SpectrumTable& off,
                                 const SpectrumTable& on, Port port,
                                 double floor) {
    if (off.grid != on.grid)
        throw std::invalid_argument("extinction_ratio: detuning grids differ");
    ExtinctionCurve out;
    out.grid = off.grid;
    out.port = port;
    out.ratio_db.resize(out.grid.size(), kNaN);
    out.masked.resize(out.grid.size(), false);
    for (size_t i = 0; i < out.grid.size(); ++i) {
        const double num = port == Port::reflection ? off.r_mean[i] : on.t_mean[i];
        const double den = port == Port::reflection ? on.r_mean[i] : off.t_mean[i];
        if (den < floor || num <= 0.0) {
            out.masked[i] = true;
        } else {
            out.ratio_db[i] = 10.0 * std::log10(num / den);
        }
    }
    return out;
}

LorentzianFit lorentzian_fit(const ExtinctionCurve& curve) {
    std::vector<double> x, y;
    for (size_t i = 0; i < curve.grid.size(); ++i) {
        if (!curve.masked[i]) {
            x.push_back(curve.grid[i]);
            y.push_back(curve.ratio_db[i]);
        }
    }
    if (x.size() < 5)
        throw std::invalid_argument("lorentzian_fit: need >= 5 unmasked points");

    const auto [mn_it, mx_it] = std::minmax_element(y.begin(), y.end());
    const size_t peak_idx = static_cast<size_t>(mx_it - y.begin());
    std::vector<double> init = {*mn_it, std::max(*mx_it - *mn_it, 1e-6),
                                x[peak_idx],
                                std::max((x.back() - x.front()) / 4.0, 1e-3)};
    // Refine width guess from the half-max crossings around the peak.
    {
        const double half = *mn_it + (*mx_it - *mn_it) / 2.0;
        double lo = x.front(), hi = x.back();
        for (size_t i = peak_idx; i-- > 0;)
            if (y[i] < half) { lo = x[i]; break; }
        for (size_t i = peak_idx + 1; i < x.size(); ++i)
            if (y[i] < half) { hi = x[i]; break; }
        if (hi > lo) init[3] = hi - lo;
    }

    LorentzianFit out;
    out.fit = fit_least_squares(x, y, lorentzian_model, init);
    // Amplitude consistent with zero: center and width are unconstrained.
    double y_scale = 0.0;
    for (double v : y) y_scale = std::max(y_scale, std::abs(v));
    if (std::abs(out.fit.params[1]) <=
        std::max(out.fit.sigma[1], 1e-9 * std::max(y_scale, 1.0)))
        out.fit.degenerate = true;
    out.center = out.fit.params[2];
    out.peak = out.fit.params[0] + out.fit.params[1];
    out.fwhm = std::abs(out.fit.params[3]);
    // Width over which the fitted curve exceeds peak - 3 dB:
    // a + b/(1+u^2) = a + b - 3  =>  u = sqrt(3 / (b - 3)).
    const double b = out.fit.params[1];
    out.bandwidth_3db = b > 3.0 ? out.fwhm * std::sqrt(3.0 / (b - 3.0)) : kNaN;
    return out;
}

SwitchingCurve switching_curve(const AtomParams& p_base,
                               const LatticeConfig& cfg, double delta_i,
                               const std::vector<double>& energies_fj,
                               const EnergyCalibration& cal, int n_real,
                               uint64_t seed, int workers) {
    SwitchingCurve out;
    out.delta_i = delta_i;
    out.energies_fj = energies_fj;
    const std::vector<double> grid = {delta_i};
    for (double e : energies_fj) {
        AtomParams p = p_base;
        p.omega_c = cal.omega_c(e);
        // Shared seed: every energy sees the same realization set.
        const SpectrumTable s = average_spectrum(p, cfg, grid, n_real, seed, workers);
        out.r.push_back(s.r_mean[0]);
        out.t.push_back(s.t_mean[0]);
    }
    return out;
}

ExponentialFit exponential_fit(const SwitchingCurve& curve) {
    const size_t n = curve.energies_fj.size();
    if (n < 4)
        throw std::invalid_argument("exponential_fit: need >= 4 points per channel");

    const double e_span = curve.energies_fj.back() - curve.energies_fj.front();
    // Characteristic-energy guess: first crossing of the 1/e level of the
    // curve's total swing.
    auto e_scale_guess = [&](const std::vector<double>& y) {
        const double swing = y.back() - y.front();
        if (std::abs(swing) < 1e-300) return std::max(e_span / 3.0, 1e-6);
        const double target = y.front() + swing * (1.0 - std::exp(-1.0));
        for (size_t i = 0; i < y.size(); ++i) {
            if ((swing > 0.0 && y[i] >= target) || (swing < 0.0 && y[i] <= target))
                return std::max(curve.energies_fj[i] - curve.energies_fj.front(),
                                e_span * 1e-3);
        }
        return std::max(e_span / 3.0, 1e-6);
    };

    ExponentialFit out;
    out.fit_r = fit_least_squares(
        curve.energies_fj, curve.r, exp_decay_model,
        {std::max(curve.r.front() - curve.r.back(), 1e-6), e_scale_guess(curve.r),
         curve.r.back()});
    out.fit_t = fit_least_squares(
        curve.energies_fj, curve.t, exp_rise_model,
        {std::max(curve.t.back() - curve.t.front(), 1e-6), e_scale_guess(curve.t),
         curve.t.front()});
    out.e_r = std::abs(out.fit_r.params[1]);
    out.e_r_sigma = out.fit_r.sigma[1];
    out.e_t = std::abs(out.fit_t.params[1]);
    out.e_t_sigma = out.fit_t.sigma[1];
    // Amplitude consistent with zero leaves the switching energy undefined.
    auto y_scale = [](const std::vector<double>& y) {
        double s = 0.0;
        for (double v : y) s = std::max(s, std::abs(v));
        return std::max(s, 1.0);
    };
    if (std::abs(out.fit_r.params[0]) <=
        std::max(out.fit_r.sigma[0], 1e-9 * y_scale(curve.r)))
        out.fit_r.degenerate = true;
    if (std::abs(out.fit_t.params[0]) <=
        std::max(out.fit_t.sigma[0], 1e-9 * y_scale(curve.t)))
        out.fit_t.degenerate = true;
    return out;
}

BandgapInfo find_bandgap(const SpectrumTable& spec) {
    if (spec.grid.empty())
        throw std::invalid_argument("find_bandgap: empty spectrum");
    const auto& r = spec.r_mean;
    size_t peak = 0;
    for (size_t i = 1; i < r.size(); ++i) {
        if (r[i] > r[peak] + 1e-12) {
            peak = i;
        }
        // Equal heights within 1e-12: keep the lower-detuning peak.
    }
    BandgapInfo out;
    out.peak_r = r[peak];
    out.center = spec.grid[peak];
    out.boundary_warning = peak == 0 || peak == r.size() - 1;

    int n_local_max = 0;
    for (size_t i = 1; i + 1 < r.size(); ++i)
        if (r[i] > r[i - 1] && r[i] > r[i + 1] && r[i] >= 0.5 * r[peak])
            ++n_local_max;
    out.multi_peak = n_local_max >= 2;

    const double half = r[peak] / 2.0;
    double lo = spec.grid.front(), hi = spec.grid.back();
    for (size_t i = peak; i-- > 0;) {
        if (r[i] <= half) {
            const double frac = (half - r[i]) / (r[i + 1] - r[i]);
            lo = spec.grid[i] + frac * (spec.grid[i + 1] - spec.grid[i]);
            break;
        }
    }
    for (size_t i = peak + 1; i < r.size(); ++i) {
        if (r[i] <= half) {
            const double frac = (r[i - 1] - half) / (r[i - 1] - r[i]);
            hi = spec.grid[i - 1] + frac * (spec.grid[i] - spec.grid[i - 1]);
            break;
        }
    }
    out.width = hi - lo;
    return out;
}

}  // namespace router
