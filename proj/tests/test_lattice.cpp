#include "doctest.h"

#include <cmath>
#include <sstream>

#include "router/lattice.hpp"
#include "router/rng.hpp"

using namespace router;

TEST_CASE("derive_site_count") {
    CHECK(derive_site_count(1600, 0.26) == 6154);
    CHECK(derive_site_count(100, 1.0) == 100);
    CHECK(derive_site_count(1, 0.5) == 2);
    CHECK_THROWS_AS(derive_site_count(10, 0.0), std::invalid_argument);
}

TEST_CASE("full filling occupies every site") {
    LatticeConfig cfg;
    cfg.filling = 1.0;
    cfg.n_sites = 10;
    cfg.phase_per_site = 1.0;
    for (uint64_t seed : {0ULL, 1ULL, 999ULL}) {
        const auto rl = sample_realization(cfg, seed);
        REQUIRE(rl.sites.size() == 10);
        for (int j = 0; j < 10; ++j) {
            CHECK(rl.sites[j] == j);
            CHECK(rl.phase_pos[j] == doctest::Approx(j * 1.0));
        }
    }
}

TEST_CASE("determinism: identical (cfg, seed) gives identical realization") {
    LatticeConfig cfg;
    cfg.filling = 0.26;
    cfg.n_atoms_target = 1600;
    cfg.phase_per_site = 3.14;
    cfg.position_jitter_rms = 0.01;
    const auto a = sample_realization(cfg, 42);
    const auto b = sample_realization(cfg, 42);
    CHECK(a.sites == b.sites);
    CHECK(a.phase_pos == b.phase_pos);
    const auto c = sample_realization(cfg, 43);
    CHECK(a.sites != c.sites);
}

TEST_CASE("occupancy statistics match the binomial oracle") {
    LatticeConfig cfg;
    cfg.filling = 0.26;
    cfg.n_atoms_target = 1600;
    cfg.phase_per_site = M_PI;
    const int n_sites = cfg.resolved_site_count();
    CHECK(n_sites == 6154);

    const int n_rep = 10000;
    double sum = 0.0;
    for (int i = 0; i < n_rep; ++i)
        sum += static_cast<double>(
            sample_realization(cfg, child_seed(1234, i)).sites.size());
    const double mean = sum / n_rep;
    const double expect = cfg.filling * n_sites;
    const double sd = std::sqrt(n_sites * cfg.filling * (1.0 - cfg.filling));
    // Ensemble mean within 3 standard errors of the binomial expectation.
    CHECK(std::abs(mean - expect) < 3.0 * sd / std::sqrt(n_rep));
}

TEST_CASE("site indices increase, positions ordered without jitter") {
    LatticeConfig cfg;
    cfg.filling = 0.5;
    cfg.n_sites = 500;
    cfg.phase_per_site = 2.7;
    const auto rl = sample_realization(cfg, 77);
    for (size_t k = 1; k < rl.sites.size(); ++k) {
        CHECK(rl.sites[k] > rl.sites[k - 1]);
        CHECK(rl.phase_pos[k] >= rl.phase_pos[k - 1]);
    }
    CHECK(rl.sites.front() >= 0);
    CHECK(rl.sites.back() < 500);
}

TEST_CASE("jitter perturbs positions but not occupancy") {
    LatticeConfig cfg;
    cfg.filling = 0.3;
    cfg.n_sites = 200;
    cfg.phase_per_site = M_PI;
    auto plain = sample_realization(cfg, 5);
    cfg.position_jitter_rms = 0.05;
    auto jittered = sample_realization(cfg, 5);
    CHECK(plain.sites == jittered.sites);
    bool moved = false;
    for (size_t k = 0; k < plain.phase_pos.size(); ++k)
        if (plain.phase_pos[k] != jittered.phase_pos[k]) moved = true;
    CHECK(moved);
}

TEST_CASE("text round trip") {
    LatticeConfig cfg;
    cfg.filling = 0.4;
    cfg.n_sites = 50;
    cfg.phase_per_site = 1.5;
    const auto rl = sample_realization(cfg, 9);
    std::stringstream ss;
    write_realization(ss, rl);
    const auto back = read_realization(ss);
    CHECK(back.sites == rl.sites);
    CHECK(back.n_sites == rl.n_sites);
    CHECK(back.phase_per_site == doctest::Approx(rl.phase_per_site));
}

TEST_CASE("config validation") {
    LatticeConfig cfg;
    cfg.filling = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.filling = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.filling = 0.5;
    cfg.position_jitter_rms = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
