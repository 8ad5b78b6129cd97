#pragma once

#include "router/lattice.hpp"
#include "router/scatter.hpp"

namespace router {

struct ChainResponse {
    complexd r{0.0, 0.0};  // left-port reflection amplitude
    complexd t{1.0, 0.0};  // transmission amplitude
};

// Total two-port response of one disorder realization at detuning delta_i.
// Alternating propagation segments and occupied-site atoms are folded in
// spatial order using scattering-form star products, which stay bounded
// inside the bandgap where transfer products overflow.
ChainResponse chain_response(const AtomParams& p, const LatticeRealization& rl,
                             double delta_i);

// Transfer-matrix route over the same chain.  Only valid while the product
// stays representable; used for small-N cross-checks.
ChainResponse chain_response_transfer(const AtomParams& p,
                                      const LatticeRealization& rl,
                                      double delta_i);

}  // namespace router
