#include "doctest.h"

#include <cmath>
#include <complex>

#include "router/chain.hpp"
#include "router/rng.hpp"
#include "router/scatter.hpp"

using namespace router;

namespace {

// Closed-form geometric-series composition of reciprocal two-port elements,
// written straight from the Fabry-Perot multiple-bounce sum.  Independent of
// the star-product implementation under test.
struct OracleElement {
    complexd rf, rb, t;
};

OracleElement oracle_join(const OracleElement& a, const OracleElement& b,
                          double phi) {
    const complexd ph = std::polar(1.0, phi);
    const complexd ph2 = ph * ph;
    const complexd den = 1.0 - a.rb * b.rf * ph2;
    return OracleElement{a.rf + a.t * a.t * b.rf * ph2 / den,
                         b.rb + b.t * b.t * a.rb * ph2 / den,
                         a.t * b.t * ph / den};
}

LatticeRealization make_chain(const std::vector<double>& phase_pos,
                              double phase_per_site, int n_sites) {
    LatticeRealization rl;
    rl.n_sites = n_sites;
    rl.phase_per_site = phase_per_site;
    for (size_t k = 0; k < phase_pos.size(); ++k) {
        rl.sites.push_back(static_cast<int>(k));
        rl.phase_pos.push_back(phase_pos[k]);
    }
    return rl;
}

AtomParams random_params(SplitMix64& rng, bool lossless) {
    AtomParams p;
    p.gamma_1d = 0.05 + rng.next_double();
    p.gamma_prime = lossless ? 0.0 : 5.0 * rng.next_double();
    p.omega_c = 8.0 * rng.next_double();
    p.delta_c = -10.0 + 20.0 * rng.next_double();
    p.gamma_gs = lossless ? 0.0 : 0.2 * rng.next_double();
    return p;
}

}  // namespace

TEST_CASE("atom_polarizability reference points") {
    // Resonant lossless two-level atom.
    AtomParams two_level{1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(std::abs(atom_polarizability(two_level, 0.0) - complexd(1.0, 0.0)) < 1e-15);

    // Two-photon resonance with gamma_gs = 0: exact transparency.
    AtomParams eit{1.0, 4.2, 5.0, 15.0, 0.0};
    CHECK(atom_polarizability(eit, 15.0) == complexd(0.0, 0.0));

    // Frozen high-precision regression value for the full Lambda response.
    AtomParams p{1.0, 4.2, 5.0, 15.0, 0.05};
    const complexd expected(0.0033007751009262516809, 0.024246776077918579066);
    CHECK(std::abs(atom_polarizability(p, 14.0) - expected) < 1e-15);
}

TEST_CASE("atom_polarizability reduces to a Lorentzian at omega_c = 0") {
    AtomParams p{1.0, 3.0, 0.0, 7.0, 0.1};
    for (double d : {-8.0, -1.0, 0.0, 2.5, 20.0}) {
        const complexd expect = (p.gamma_1d / 2.0) /
                                complexd(p.gamma_tot() / 2.0, -d);
        CHECK(std::abs(atom_polarizability(p, d) - expect) < 1e-15);
    }
}

TEST_CASE("atom_rt") {
    CHECK(atom_rt({0.0, 0.0}).r == complexd(0.0, 0.0));
    CHECK(atom_rt({0.0, 0.0}).t == complexd(1.0, 0.0));
    CHECK(atom_rt({1.0, 0.0}).r == complexd(-1.0, 0.0));
    CHECK(atom_rt({1.0, 0.0}).t == complexd(0.0, 0.0));
    const ScatterElement e = atom_rt({0.5, -0.1});
    CHECK(e.r == complexd(-0.5, 0.1));
    CHECK(e.t == complexd(0.5, 0.1));
    // Construction constraint t - r = 1.
    SplitMix64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const complexd xi{rng.next_double(), rng.next_double() - 0.5};
        const ScatterElement s = atom_rt(xi);
        CHECK(std::abs(s.t - s.r - 1.0) < 1e-15);
    }
}

TEST_CASE("propagation_phase") {
    CHECK(propagation_phase(852.35, 852.35) == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(propagation_phase(852.35, 2.0 * 852.35) ==
          doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    const double lam = 852.35;
    const double phi = propagation_phase(lam, lam * (1.0 + 0.15 / lam));
    CHECK(phi == doctest::Approx(M_PI * (1.0 + 0.15 / 852.35)).epsilon(1e-9));
    CHECK_THROWS_AS(propagation_phase(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("element_transfer") {
    const Tmat2 id = element_transfer({{0.0, 0.0}, {1.0, 0.0}});
    CHECK(std::abs(id.m00 - 1.0) < 1e-15);
    CHECK(std::abs(id.m01) < 1e-15);
    CHECK(std::abs(id.m10) < 1e-15);
    CHECK(std::abs(id.m11 - 1.0) < 1e-15);

    const double eps = 1e-3;
    const Tmat2 near_opaque = element_transfer({{-1.0 + eps, 0.0}, {eps, 0.0}});
    CHECK(std::abs(near_opaque.det() - 1.0) < 1e-9);

    // Symbolic 2x2 oracle for (r, t) = (-1/2, 1/2): M = [[0, -1], [1, 2]].
    const Tmat2 m = element_transfer({{-0.5, 0.0}, {0.5, 0.0}});
    CHECK(std::abs(m.m00) < 1e-15);
    CHECK(std::abs(m.m01 + 1.0) < 1e-15);
    CHECK(std::abs(m.m10 - 1.0) < 1e-15);
    CHECK(std::abs(m.m11 - 2.0) < 1e-15);
    CHECK(std::abs(m.det() - 1.0) < 1e-15);

    CHECK_THROWS_AS(element_transfer({{-1.0, 0.0}, {0.0, 0.0}}),
                    degenerate_element_error);
}

TEST_CASE("single-element transfer determinant is 1 for random atoms") {
    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const AtomParams p = random_params(rng, false);
        const double d = -30.0 + 60.0 * rng.next_double();
        const Tmat2 m = element_transfer(atom_rt(atom_polarizability(p, d)));
        CHECK(std::abs(m.det() - 1.0) < 1e-12);
    }
}

TEST_CASE("redheffer_compose identity and associativity") {
    SplitMix64 rng(3);
    const Smat2 s = Smat2::from_element(atom_rt({0.3, -0.2}));
    const Smat2 si = redheffer_compose(s, Smat2::identity());
    CHECK(std::abs(si.r_fw - s.r_fw) < 1e-15);
    CHECK(std::abs(si.t_fw - s.t_fw) < 1e-15);

    for (int i = 0; i < 50; ++i) {
        Smat2 e[3];
        for (auto& x : e) {
            x = Smat2::from_element(
                atom_rt({0.6 * rng.next_double(), 0.4 * (rng.next_double() - 0.5)}));
            x = redheffer_compose(Smat2::propagation(rng.next_double() * 6.0), x);
        }
        const Smat2 lr = redheffer_compose(redheffer_compose(e[0], e[1]), e[2]);
        const Smat2 rl = redheffer_compose(e[0], redheffer_compose(e[1], e[2]));
        CHECK(std::abs(lr.r_fw - rl.r_fw) < 1e-13);
        CHECK(std::abs(lr.t_fw - rl.t_fw) < 1e-13);
        CHECK(std::abs(lr.r_bw - rl.r_bw) < 1e-13);
        CHECK(std::abs(lr.t_bw - rl.t_bw) < 1e-13);
    }
}

TEST_CASE("two atoms match the geometric-series two-bounce sum") {
    SplitMix64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const AtomParams p = random_params(rng, false);
        const double d = -20.0 + 40.0 * rng.next_double();
        const double phi = 0.1 + 3.0 * rng.next_double();
        const ScatterElement a = atom_rt(atom_polarizability(p, d));

        const Smat2 chain = redheffer_compose(
            Smat2::from_element(a),
            redheffer_compose(Smat2::propagation(phi), Smat2::from_element(a)));

        const complexd ph2 = std::polar(1.0, 2.0 * phi);
        const complexd den = 1.0 - a.r * a.r * ph2;
        const complexd r_expect = a.r + a.t * a.t * a.r * ph2 / den;
        const complexd t_expect = a.t * a.t * std::polar(1.0, phi) / den;
        CHECK(std::abs(chain.r_fw - r_expect) < 1e-13);
        CHECK(std::abs(chain.t_fw - t_expect) < 1e-13);
    }
}

TEST_CASE("chain_response trivial reductions") {
    AtomParams p{1.0, 2.0, 3.0, 5.0, 0.1};
    LatticeRealization vacuum;
    vacuum.n_sites = 10;
    vacuum.phase_per_site = 1.3;
    const ChainResponse v = chain_response(p, vacuum, 2.0);
    CHECK(std::abs(v.r) == 0.0);
    CHECK(std::abs(std::abs(v.t) - 1.0) < 1e-14);

    // One occupied site: R, T equal the bare atom values.
    const auto rl = make_chain({2.0}, 1.0, 5);
    const ScatterElement bare = atom_rt(atom_polarizability(p, 2.0));
    const ChainResponse one = chain_response(p, rl, 2.0);
    CHECK(std::abs(std::norm(one.r) - std::norm(bare.r)) < 1e-14);
    CHECK(std::abs(std::norm(one.t) - std::norm(bare.t)) < 1e-14);
}

TEST_CASE("chain_response matches recursive pairwise oracle for N = 3") {
    SplitMix64 rng(13);
    for (int i = 0; i < 50; ++i) {
        const AtomParams p = random_params(rng, false);
        const double d = -20.0 + 40.0 * rng.next_double();
        const double phi = 0.5 + 2.5 * rng.next_double();
        std::vector<double> pos;
        double acc = rng.next_double() * phi;
        for (int k = 0; k < 3; ++k) {
            pos.push_back(acc);
            acc += phi * (0.5 + rng.next_double());
        }
        const auto rl = make_chain(pos, phi, 5);

        const ScatterElement a = atom_rt(atom_polarizability(p, d));
        OracleElement total{0.0, 0.0, 1.0};
        double prev = 0.0;
        for (double x : pos) {
            total = oracle_join(total, OracleElement{a.r, a.r, a.t}, x - prev);
            prev = x;
        }
        const double tail = rl.total_phase() - prev;
        total.t *= std::polar(1.0, tail);

        const ChainResponse c = chain_response(p, rl, d);
        CHECK(std::abs(c.r - total.rf) < 1e-12);
        CHECK(std::abs(c.t - total.t) < 1e-12);
    }
}

TEST_CASE("lossless chains conserve R + T; lossy chains are passive") {
    SplitMix64 rng(17);
    for (int i = 0; i < 60; ++i) {
        const bool lossless = i % 2 == 0;
        const AtomParams p = random_params(rng, lossless);
        const double phi = M_PI * (0.8 + 0.4 * rng.next_double());
        std::vector<double> pos;
        const int n = 1 + static_cast<int>(rng.next_double() * 20);
        for (int k = 0; k < n; ++k) pos.push_back(phi * k);
        const auto rl = make_chain(pos, phi, n);
        const double d = -25.0 + 50.0 * rng.next_double();
        const ChainResponse c = chain_response(p, rl, d);
        const double sum = std::norm(c.r) + std::norm(c.t);
        if (lossless) {
            CHECK(std::abs(sum - 1.0) < 1e-10);
        } else {
            CHECK(sum <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("EIT exact transparency holds for whole chains") {
    SplitMix64 rng(23);
    for (int i = 0; i < 20; ++i) {
        AtomParams p = random_params(rng, false);
        p.gamma_gs = 0.0;
        p.omega_c = 1.0 + 5.0 * rng.next_double();
        const double phi = M_PI * (0.9 + 0.2 * rng.next_double());
        std::vector<double> pos;
        const int n = 1 + static_cast<int>(rng.next_double() * 100);
        for (int k = 0; k < n; ++k) pos.push_back(phi * k);
        const auto rl = make_chain(pos, phi, n);
        const ChainResponse c = chain_response(p, rl, p.delta_c);
        CHECK(std::abs(c.r) == 0.0);
        CHECK(std::abs(std::abs(c.t) - 1.0) < 1e-12);
    }
}

TEST_CASE("reciprocity: mirrored chain has identical |t|") {
    SplitMix64 rng(29);
    for (int i = 0; i < 30; ++i) {
        const AtomParams p = random_params(rng, false);
        const double phi = 2.0 + rng.next_double();
        std::vector<double> pos;
        double acc = rng.next_double();
        const int n = 2 + static_cast<int>(rng.next_double() * 10);
        for (int k = 0; k < n; ++k) {
            pos.push_back(acc);
            acc += phi * (0.3 + rng.next_double());
        }
        const auto rl = make_chain(pos, phi, n + 1);
        const double total = rl.total_phase();
        std::vector<double> mirrored;
        for (size_t k = pos.size(); k-- > 0;) mirrored.push_back(total - pos[k]);
        const auto rl_m = make_chain(mirrored, phi, n + 1);

        const double d = -15.0 + 30.0 * rng.next_double();
        const ChainResponse fwd = chain_response(p, rl, d);
        const ChainResponse bwd = chain_response(p, rl_m, d);
        CHECK(std::abs(std::abs(fwd.t) - std::abs(bwd.t)) < 1e-12);
    }
}

TEST_CASE("transfer and scattering routes agree for N <= 50") {
    SplitMix64 rng(31);
    for (int i = 0; i < 30; ++i) {
        const AtomParams p = random_params(rng, false);
        const double phi = M_PI * (0.95 + 0.1 * rng.next_double());
        const int n = 1 + static_cast<int>(rng.next_double() * 50);
        std::vector<double> pos;
        for (int k = 0; k < n; ++k) pos.push_back(phi * k);
        const auto rl = make_chain(pos, phi, n);
        const double d = -20.0 + 40.0 * rng.next_double();
        const ChainResponse star = chain_response(p, rl, d);
        const ChainResponse xfer = chain_response_transfer(p, rl, d);
        CHECK(std::abs(star.r - xfer.r) < 1e-9);
        CHECK(std::abs(star.t - xfer.t) < 1e-9);
    }
}
