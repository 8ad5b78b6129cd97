#pragma once

#include <complex>
#include <stdexcept>

// Core single-atom response and two-port composition.
//
// Unit convention: every rate and detuning (gamma_1d, gamma_prime, omega_c,
// delta_c, gamma_gs, delta_i) is an ordinary frequency in MHz, non-angular.
// Only ratios of these enter the response, so no 2*pi factors appear below.

namespace router {

using complexd = std::complex<double>;

struct AtomParams {
    double gamma_1d = 0.0;    // emission rate into the guided mode (MHz)
    double gamma_prime = 0.0; // emission rate into non-guided channels (MHz)
    double omega_c = 0.0;     // control Rabi frequency (MHz)
    double delta_c = 0.0;     // control detuning (MHz)
    double gamma_gs = 0.0;    // ground-state coherence decay (MHz)

    double gamma_tot() const { return gamma_1d + gamma_prime; }
    void validate() const;
};

// Side-coupled pointlike scatterer; construction guarantees t - r = 1.
struct ScatterElement {
    complexd r{0.0, 0.0};
    complexd t{1.0, 0.0};
};

// Two-port scattering matrix with scalar channels.
//   r_fw: reflection for light incident from the left
//   r_bw: reflection for light incident from the right
//   t_fw / t_bw: left->right / right->left transmission
struct Smat2 {
    complexd t_fw{1.0, 0.0};
    complexd t_bw{1.0, 0.0};
    complexd r_fw{0.0, 0.0};
    complexd r_bw{0.0, 0.0};

    static Smat2 identity() { return Smat2{}; }
    static Smat2 from_element(const ScatterElement& e) {
        return Smat2{e.t, e.t, e.r, e.r};
    }
    static Smat2 propagation(double phase) {
        const complexd t = std::polar(1.0, phase);
        return Smat2{t, t, {0.0, 0.0}, {0.0, 0.0}};
    }
};

// Transfer matrix relating (forward, backward) amplitudes on the right side
// of an element to those on the left: [f_R; b_R] = M [f_L; b_L].
// Chains compose as M_total = M_N * ... * M_1 (element 1 leftmost).
struct Tmat2 {
    complexd m00{1.0, 0.0}, m01{0.0, 0.0};
    complexd m10{0.0, 0.0}, m11{1.0, 0.0};

    complexd det() const { return m00 * m11 - m01 * m10; }
    Tmat2 operator*(const Tmat2& rhs) const {
        return Tmat2{m00 * rhs.m00 + m01 * rhs.m10, m00 * rhs.m01 + m01 * rhs.m11,
                     m10 * rhs.m00 + m11 * rhs.m10, m10 * rhs.m01 + m11 * rhs.m11};
    }
};

struct degenerate_element_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resonant_divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lambda-system polarizability xi(delta_i).  At the singular EIT point
// (gamma_gs = 0, delta_i = delta_c, omega_c > 0) the analytic limit xi = 0
// is returned instead of evaluating 0/0.
complexd atom_polarizability(const AtomParams& p, double delta_i);

// r = -xi, t = 1 - xi.
ScatterElement atom_rt(complexd xi);

// One-way phase accumulated over one lattice period a = lambda_trap / 2.
// Exact Bragg condition <=> return value == pi.
double propagation_phase(double lambda_probe_nm, double lambda_trap_nm);

// M = (1/t) [[t^2 - r^2, r], [-r, 1]]; throws degenerate_element_error for
// |t| below 1e-300.
Tmat2 element_transfer(const ScatterElement& e);

// Recover (r_fw, t) of a composed chain from its transfer matrix.
ScatterElement transfer_to_rt(const Tmat2& m);

// Redheffer star product; `a` is hit first by left-incident light.
Smat2 redheffer_compose(const Smat2& a, const Smat2& b);

}  // namespace router
