#include "router/chain.hpp"

namespace router {

ChainResponse chain_response(const AtomParams& p, const LatticeRealization& rl,
                             double delta_i) {
    const complexd xi = atom_polarizability(p, delta_i);
    const Smat2 atom = Smat2::from_element(atom_rt(xi));
    Smat2 total = Smat2::identity();
    double prev = 0.0;
    for (size_t k = 0; k < rl.sites.size(); ++k) {
        const double seg = rl.phase_pos[k] - prev;
        if (seg != 0.0)
            total = redheffer_compose(total, Smat2::propagation(seg));
        total = redheffer_compose(total, atom);
        prev = rl.phase_pos[k];
    }
    const double tail = rl.total_phase() - prev;
    if (tail != 0.0)
        total = redheffer_compose(total, Smat2::propagation(tail));
    return ChainResponse{total.r_fw, total.t_fw};
}

ChainResponse chain_response_transfer(const AtomParams& p,
                                      const LatticeRealization& rl,
                                      double delta_i) {
    const complexd xi = atom_polarizability(p, delta_i);
    const Tmat2 atom = element_transfer(atom_rt(xi));
    auto prop = [](double phase) {
        const complexd f = std::polar(1.0, phase);
        return Tmat2{f, {0.0, 0.0}, {0.0, 0.0}, 1.0 / f};
    };
    Tmat2 total;  // identity
    double prev = 0.0;
    for (size_t k = 0; k < rl.sites.size(); ++k) {
        const double seg = rl.phase_pos[k] - prev;
        if (seg != 0.0) total = prop(seg) * total;
        total = atom * total;
        prev = rl.phase_pos[k];
    }
    const double tail = rl.total_phase() - prev;
    if (tail != 0.0) total = prop(tail) * total;
    const ScatterElement rt = transfer_to_rt(total);
    return ChainResponse{rt.r, rt.t};
}

}  // namespace router
