#pragma once

#include <cstdint>
#include <vector>

#include "router/chain.hpp"
#include "router/lattice.hpp"
#include "router/scatter.hpp"

namespace router {

struct SpectrumTable {
    std::vector<double> grid;      // detunings (MHz), strictly increasing
    std::vector<double> r_mean;    // mean |r|^2
    std::vector<double> r_stderr;
    std::vector<double> t_mean;    // mean |t|^2
    std::vector<double> t_stderr;
    std::vector<complexd> r_amp;   // mean complex r (coherent average)
    std::vector<complexd> t_amp;   // mean complex t
    int n_realizations = 0;
};

// Monte Carlo disorder average over n_real realizations.  Realization i uses
// child_seed(master_seed, i), so the realization set is independent of how
// work is partitioned.  Partial sums are accumulated per fixed-size block and
// reduced pairwise in index order; results are bit-stable for any worker
// count.  workers = 0 picks the hardware concurrency.
SpectrumTable average_spectrum(const AtomParams& p, const LatticeConfig& cfg,
                               const std::vector<double>& grid, int n_real,
                               uint64_t master_seed, int workers = 0);

// Control-on / control-off spectra on the same realization set (shared
// seeds), so on/off comparisons are disorder-matched.
std::pair<SpectrumTable, SpectrumTable> spectrum_pair(
    const AtomParams& p_on, const AtomParams& p_off, const LatticeConfig& cfg,
    const std::vector<double>& grid, int n_real, uint64_t master_seed,
    int workers = 0);

std::vector<double> make_grid(double min_mhz, double max_mhz, double step_mhz);

}  // namespace router
