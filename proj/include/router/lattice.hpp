#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace router {

struct LatticeConfig {
    int n_atoms_target = 1600;       // expected atom number
    double filling = 0.26;           // site occupancy probability
    int n_sites = 0;                 // 0 => derived from target / filling
    double phase_per_site = 0.0;     // one-way phase per lattice period (rad)
    double position_jitter_rms = 0.0;  // rms phase jitter per occupied atom

    int resolved_site_count() const;
    void validate() const;
};

struct LatticeRealization {
    std::vector<int> sites;            // occupied-site indices, increasing
    std::vector<double> phase_pos;     // cumulative phase position per atom
    int n_sites = 0;
    double phase_per_site = 0.0;

    double total_phase() const { return phase_per_site * n_sites; }
};

int derive_site_count(int n_atoms, double filling);

LatticeRealization sample_realization(const LatticeConfig& cfg, uint64_t seed);

// One occupied-site index per line, after a "# n_sites phase_per_site" header.
void write_realization(std::ostream& os, const LatticeRealization& r);
LatticeRealization read_realization(std::istream& is);

}  // namespace router
