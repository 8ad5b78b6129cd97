#include "router/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "router/rng.hpp"

namespace router {

namespace {

constexpr int kBlockSize = 8;

struct Accum {
    std::vector<double> sum_r, sum_r2, sum_t, sum_t2;
    std::vector<complexd> sum_ra, sum_ta;

    explicit Accum(size_t n)
        : sum_r(n, 0.0), sum_r2(n, 0.0), sum_t(n, 0.0), sum_t2(n, 0.0),
          sum_ra(n, complexd{}), sum_ta(n, complexd{}) {}

    void add(const Accum& o) {
        for (size_t i = 0; i < sum_r.size(); ++i) {
            sum_r[i] += o.sum_r[i];
            sum_r2[i] += o.sum_r2[i];
            sum_t[i] += o.sum_t[i];
            sum_t2[i] += o.sum_t2[i];
            sum_ra[i] += o.sum_ra[i];
            sum_ta[i] += o.sum_ta[i];
        }
    }
};

// Pairwise reduction in fixed order over [lo, hi).
Accum reduce_blocks(std::vector<Accum>& blocks, size_t lo, size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const size_t mid = lo + (hi - lo) / 2;
    Accum left = reduce_blocks(blocks, lo, mid);
    left.add(reduce_blocks(blocks, mid, hi));
    return left;
}

}  // namespace

std::vector<double> make_grid(double min_mhz, double max_mhz, double step_mhz) {
    if (!(step_mhz > 0.0) || !(max_mhz >= min_mhz))
        throw std::invalid_argument("make_grid: bad range or step");
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((max_mhz - min_mhz) / step_mhz + 0.5)) + 1;
    g.reserve(n);
    for (int i = 0; i < n; ++i) g.push_back(min_mhz + i * step_mhz);
    return g;
}

SpectrumTable average_spectrum(const AtomParams& p, const LatticeConfig& cfg,
                               const std::vector<double>& grid, int n_real,
                               uint64_t master_seed, int workers) {
    p.validate();
    cfg.validate();
    if (n_real < 1) throw std::invalid_argument("average_spectrum: n_real >= 1");
    if (grid.empty()) throw std::invalid_argument("average_spectrum: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("average_spectrum: grid must be strictly increasing");

    const size_t ng = grid.size();
    const int n_blocks = (n_real + kBlockSize - 1) / kBlockSize;
    std::vector<Accum> blocks(n_blocks, Accum(ng));

    auto run_block = [&](int b) {
        Accum& acc = blocks[b];
        const int first = b * kBlockSize;
        const int last = std::min(n_real, first + kBlockSize);
        for (int i = first; i < last; ++i) {
            const LatticeRealization rl =
                sample_realization(cfg, child_seed(master_seed, static_cast<uint64_t>(i)));
            for (size_t k = 0; k < ng; ++k) {
                ChainResponse c;
                try {
                    c = chain_response(p, rl, grid[k]);
                } catch (const std::exception& e) {
                    throw std::runtime_error(
                        "average_spectrum: realization " + std::to_string(i) +
                        ", delta_i=" + std::to_string(grid[k]) + " MHz: " + e.what());
                }
                const double R = std::norm(c.r);
                const double T = std::norm(c.t);
                acc.sum_r[k] += R;
                acc.sum_r2[k] += R * R;
                acc.sum_t[k] += T;
                acc.sum_t2[k] += T * T;
                acc.sum_ra[k] += c.r;
                acc.sum_ta[k] += c.t;
            }
        }
    };

    int n_workers = workers > 0 ? workers
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min(n_workers, n_blocks);

    if (n_workers == 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex err_mutex;
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int b = next.fetch_add(1);
                    if (b >= n_blocks) return;
                    try {
                        run_block(b);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    const Accum total = reduce_blocks(blocks, 0, blocks.size());

    SpectrumTable out;
    out.grid = grid;
    out.n_realizations = n_real;
    out.r_mean.resize(ng);
    out.r_stderr.resize(ng);
    out.t_mean.resize(ng);
    out.t_stderr.resize(ng);
    out.r_amp.resize(ng);
    out.t_amp.resize(ng);
    const double n = static_cast<double>(n_real);
    for (size_t k = 0; k < ng; ++k) {
        out.r_mean[k] = total.sum_r[k] / n;
        out.t_mean[k] = total.sum_t[k] / n;
        out.r_amp[k] = total.sum_ra[k] / n;
        out.t_amp[k] = total.sum_ta[k] / n;
        if (n_real > 1) {
            const double var_r =
                std::max(0.0, (total.sum_r2[k] - n * out.r_mean[k] * out.r_mean[k]) / (n - 1.0));
            const double var_t =
                std::max(0.0, (total.sum_t2[k] - n * out.t_mean[k] * out.t_mean[k]) / (n - 1.0));
            out.r_stderr[k] = std::sqrt(var_r / n);
            out.t_stderr[k] = std::sqrt(var_t / n);
        } else {
            out.r_stderr[k] = 0.0;
            out.t_stderr[k] = 0.0;
        }
    }
    return out;
}

std::pair<SpectrumTable, SpectrumTable> spectrum_pair(
    const AtomParams& p_on, const AtomParams& p_off, const LatticeConfig& cfg,
    const std::vector<double>& grid, int n_real, uint64_t master_seed,
    int workers) {
    if (p_off.omega_c != 0.0)
        throw std::invalid_argument("spectrum_pair: p_off must have omega_c = 0");
    SpectrumTable on = average_spectrum(p_on, cfg, grid, n_real, master_seed, workers);
    SpectrumTable off = average_spectrum(p_off, cfg, grid, n_real, master_seed, workers);
    return {std::move(on), std::move(off)};
}

}  // namespace router
