#include "router/lattice.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "router/rng.hpp"

namespace router {

int derive_site_count(int n_atoms, double filling) {
    if (n_atoms <= 0 || !(filling > 0.0))
        throw std::invalid_argument(
            "derive_site_count: n_atoms and filling must be positive");
    return static_cast<int>(std::llround(static_cast<double>(n_atoms) / filling));
}

int LatticeConfig::resolved_site_count() const {
    return n_sites > 0 ? n_sites : derive_site_count(n_atoms_target, filling);
}

void LatticeConfig::validate() const {
    if (!(filling > 0.0) || filling > 1.0)
        throw std::invalid_argument("LatticeConfig: filling must be in (0, 1]");
    if (resolved_site_count() < 1)
        throw std::invalid_argument("LatticeConfig: n_sites must be >= 1");
    if (position_jitter_rms < 0.0)
        throw std::invalid_argument("LatticeConfig: position_jitter_rms >= 0");
}

LatticeRealization sample_realization(const LatticeConfig& cfg, uint64_t seed) {
    cfg.validate();
    const int n = cfg.resolved_site_count();
    LatticeRealization out;
    out.n_sites = n;
    out.phase_per_site = cfg.phase_per_site;
    out.sites.reserve(static_cast<size_t>(std::ceil(n * cfg.filling * 1.2)) + 8);
    // Separate streams so occupancy is unchanged when jitter is toggled.
    SplitMix64 occupancy(child_seed(seed, 0));
    SplitMix64 jitter(child_seed(seed, 1));
    for (int j = 0; j < n; ++j) {
        if (occupancy.next_double() < cfg.filling) {
            double pos = cfg.phase_per_site * j;
            if (cfg.position_jitter_rms > 0.0)
                pos += cfg.position_jitter_rms * jitter.next_normal();
            out.sites.push_back(j);
            out.phase_pos.push_back(pos);
        }
    }
    return out;
}

void write_realization(std::ostream& os, const LatticeRealization& r) {
    os << "# " << r.n_sites << " " << r.phase_per_site << "\n";
    for (int s : r.sites) os << s << "\n";
}

LatticeRealization read_realization(std::istream& is) {
    LatticeRealization r;
    std::string line;
    if (!std::getline(is, line) || line.size() < 2 || line[0] != '#')
        throw std::runtime_error("read_realization: missing header line");
    {
        std::istringstream hdr(line.substr(1));
        if (!(hdr >> r.n_sites >> r.phase_per_site))
            throw std::runtime_error("read_realization: malformed header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        r.sites.push_back(std::stoi(line));
        r.phase_pos.push_back(r.phase_per_site * r.sites.back());
    }
    return r;
}

}  // namespace router
