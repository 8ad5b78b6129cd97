#include "router/scatter.hpp"

#include <cmath>

namespace router {

void AtomParams::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!(finite(gamma_1d) && finite(gamma_prime) && finite(omega_c) &&
          finite(delta_c) && finite(gamma_gs)))
        throw std::invalid_argument("AtomParams: all rates must be finite");
    if (!(gamma_1d > 0.0))
        throw std::invalid_argument("AtomParams: gamma_1d must be > 0");
    if (gamma_prime < 0.0 || gamma_gs < 0.0 || omega_c < 0.0)
        throw std::invalid_argument(
            "AtomParams: gamma_prime, gamma_gs, omega_c must be >= 0");
}

complexd atom_polarizability(const AtomParams& p, double delta_i) {
    const double two_photon = delta_i - p.delta_c;
    if (p.gamma_gs == 0.0 && two_photon == 0.0 && p.omega_c > 0.0) {
        // EIT term diverges; the full expression has the limit xi -> 0.
        return {0.0, 0.0};
    }
    complexd denom(p.gamma_tot() / 2.0, -delta_i);
    if (p.omega_c > 0.0) {
        const complexd eit_den(p.gamma_gs / 2.0, -two_photon);
        denom += (p.omega_c * p.omega_c / 4.0) / eit_den;
    }
    return (p.gamma_1d / 2.0) / denom;
}

ScatterElement atom_rt(complexd xi) { return ScatterElement{-xi, 1.0 - xi}; }

double propagation_phase(double lambda_probe_nm, double lambda_trap_nm) {
    if (!(lambda_probe_nm > 0.0) || !(lambda_trap_nm > 0.0))
        throw std::invalid_argument("propagation_phase: wavelengths must be > 0");
    return M_PI * lambda_trap_nm / lambda_probe_nm;
}

Tmat2 element_transfer(const ScatterElement& e) {
    if (std::abs(e.t) < 1e-300)
        throw degenerate_element_error(
            "element_transfer: |t| below 1e-300, element is opaque; use "
            "scattering-form composition");
    const complexd inv_t = 1.0 / e.t;
    return Tmat2{(e.t * e.t - e.r * e.r) * inv_t, e.r * inv_t,
                 -e.r * inv_t, inv_t};
}

ScatterElement transfer_to_rt(const Tmat2& m) {
    // For incidence from the left: b_R = 0 gives b_L = -m10/m11 (reflection)
    // and f_R = det(M)/m11 (transmission).
    return ScatterElement{-m.m10 / m.m11, m.det() / m.m11};
}

Smat2 redheffer_compose(const Smat2& a, const Smat2& b) {
    const complexd loop = a.r_bw * b.r_fw;
    const complexd den = 1.0 - loop;
    if (den == complexd(0.0, 0.0))
        throw resonant_divergence_error(
            "redheffer_compose: unit inter-element loop gain");
    const complexd inv = 1.0 / den;
    Smat2 out;
    out.t_fw = b.t_fw * a.t_fw * inv;
    out.t_bw = a.t_bw * b.t_bw * inv;
    out.r_fw = a.r_fw + a.t_bw * b.r_fw * a.t_fw * inv;
    out.r_bw = b.r_bw + b.t_fw * a.r_bw * b.t_bw * inv;
    return out;
}

}  // namespace router
