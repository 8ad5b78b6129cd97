#include "doctest.h"

#include <cmath>

#include "router/ensemble.hpp"
#include "router/rng.hpp"

using namespace router;

namespace {

LatticeConfig small_lattice(int n_atoms = 200, double filling = 0.26) {
    LatticeConfig cfg;
    cfg.n_atoms_target = n_atoms;
    cfg.filling = filling;
    cfg.phase_per_site = propagation_phase(852.35, 852.35 + 0.15);
    return cfg;
}

const AtomParams kDefaultAtom{0.026, 5.2 - 0.026, 0.0, 15.0, 0.05};

}  // namespace

TEST_CASE("make_grid") {
    const auto g = make_grid(-1.0, 1.0, 0.5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == -1.0);
    CHECK(g.back() == 1.0);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("n_real=1 with full filling equals the ordered-chain spectrum") {
    LatticeConfig cfg = small_lattice(50, 1.0);
    const auto grid = make_grid(-5.0, 25.0, 1.0);
    const auto tbl = average_spectrum(kDefaultAtom, cfg, grid, 1, 99);

    const auto rl = sample_realization(cfg, child_seed(99, 0));
    REQUIRE(rl.sites.size() == 50);
    for (size_t i = 0; i < grid.size(); ++i) {
        const ChainResponse c = chain_response(kDefaultAtom, rl, grid[i]);
        CHECK(tbl.r_mean[i] == std::norm(c.r));
        CHECK(tbl.t_mean[i] == std::norm(c.t));
        CHECK(tbl.r_stderr[i] == 0.0);
    }
}

TEST_CASE("lossless params give pointwise R + T = 1") {
    AtomParams p{0.5, 0.0, 2.0, 15.0, 0.0};
    const auto tbl = average_spectrum(p, small_lattice(), make_grid(-10.0, 25.0, 2.5), 20, 7);
    for (size_t i = 0; i < tbl.grid.size(); ++i)
        CHECK(std::abs(tbl.r_mean[i] + tbl.t_mean[i] - 1.0) < 1e-10);
}

TEST_CASE("results are bit-identical for 1 and 4 workers") {
    const auto grid = make_grid(0.0, 20.0, 1.0);
    const auto a = average_spectrum(kDefaultAtom, small_lattice(), grid, 37, 5, 1);
    const auto b = average_spectrum(kDefaultAtom, small_lattice(), grid, 37, 5, 4);
    CHECK(a.r_mean == b.r_mean);
    CHECK(a.t_mean == b.t_mean);
    CHECK(a.r_stderr == b.r_stderr);
    CHECK(a.r_amp == b.r_amp);
    CHECK(a.t_amp == b.t_amp);
}

TEST_CASE("standard error scales as 1/sqrt(n) over a decade") {
    const std::vector<double> grid = {14.0};
    // Average the stderr estimate itself over independent master seeds so the
    // scaling check is not dominated by estimator noise.
    auto mean_stderr = [&](int n_real) {
        double sum = 0.0;
        const int reps = 12;
        for (int k = 0; k < reps; ++k) {
            const auto tbl = average_spectrum(kDefaultAtom, small_lattice(), grid,
                                              n_real, 1000 + k);
            sum += tbl.r_stderr[0];
        }
        return sum / reps;
    };
    const double se_small = mean_stderr(20);
    const double se_large = mean_stderr(200);
    const double ratio = se_small / se_large;
    CHECK(ratio > std::sqrt(10.0) * 0.8);
    CHECK(ratio < std::sqrt(10.0) * 1.2);
}

TEST_CASE("spectrum_pair shares realizations across on and off") {
    AtomParams p_on = kDefaultAtom;
    p_on.omega_c = 5.0;
    AtomParams p_off = kDefaultAtom;
    const auto grid = make_grid(10.0, 18.0, 1.0);

    SUBCASE("omega_c(on) = 0 gives bitwise identical tables") {
        const auto [on, off] = spectrum_pair(p_off, p_off, small_lattice(), grid, 10, 3);
        CHECK(on.r_mean == off.r_mean);
        CHECK(on.t_mean == off.t_mean);
        CHECK(on.r_amp == off.r_amp);
    }

    SUBCASE("p_off must have the control off") {
        CHECK_THROWS_AS(spectrum_pair(p_on, p_on, small_lattice(), grid, 4, 3),
                        std::invalid_argument);
    }

    SUBCASE("control on suppresses reflection at the two-photon resonance") {
        const auto [on, off] =
            spectrum_pair(p_on, p_off, small_lattice(800), grid, 40, 3);
        const size_t i = 5;  // delta_i = 15 MHz
        REQUIRE(grid[i] == 15.0);
        CHECK(on.r_mean[i] < off.r_mean[i]);
    }
}

TEST_CASE("matched seeds reduce on/off difference variance") {
    AtomParams p_on = kDefaultAtom;
    p_on.omega_c = 5.0;
    const std::vector<double> grid = {14.0};
    const LatticeConfig cfg = small_lattice();
    const int n_rep = 30, n_real = 8;
    double matched_var = 0.0, unmatched_var = 0.0;
    std::vector<double> dm, du;
    for (int k = 0; k < n_rep; ++k) {
        const auto [on, off] = spectrum_pair(p_on, kDefaultAtom, cfg, grid, n_real, k);
        dm.push_back(off.r_mean[0] - on.r_mean[0]);
        const auto on_u = average_spectrum(p_on, cfg, grid, n_real, k);
        const auto off_u = average_spectrum(kDefaultAtom, cfg, grid, n_real, 7777 + k);
        du.push_back(off_u.r_mean[0] - on_u.r_mean[0]);
    }
    auto variance = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / (v.size() - 1);
    };
    matched_var = variance(dm);
    unmatched_var = variance(du);
    CHECK(matched_var < unmatched_var);
}

TEST_CASE("input validation") {
    const auto grid = make_grid(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(average_spectrum(kDefaultAtom, small_lattice(), grid, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(average_spectrum(kDefaultAtom, small_lattice(), {}, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(average_spectrum(kDefaultAtom, small_lattice(), {1.0, 1.0}, 1, 1),
                    std::invalid_argument);
}
