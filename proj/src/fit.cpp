#include "router/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace router {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTol = 1e-10;

// Solves A x = b for small symmetric positive (semi)definite A in place.
// Returns false when A is singular to working precision.
bool solve_spd(std::vector<std::vector<double>> a, std::vector<double> b,
               std::vector<double>& x) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return true;
}

bool invert_spd(const std::vector<std::vector<double>>& a,
                std::vector<std::vector<double>>& inv) {
    const size_t n = a.size();
    inv.assign(n, std::vector<double>(n, 0.0));
    for (size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0), x;
        e[col] = 1.0;
        if (!solve_spd(a, e, x)) return false;
        for (size_t r = 0; r < n; ++r) inv[r][col] = x[r];
    }
    return true;
}

double chi2(const std::vector<double>& x, const std::vector<double>& y,
            const ModelFn& model, const std::vector<double>& p) {
    double ssr = 0.0;
    std::vector<double> jac(p.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double f;
        model(x[i], p, f, jac);
        const double r = y[i] - f;
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

FitResult fit_least_squares(const std::vector<double>& x,
                            const std::vector<double>& y, ModelFn model,
                            std::vector<double> params) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_least_squares: x/y size mismatch");
    const size_t n = x.size();
    const size_t np = params.size();
    if (n < np)
        throw std::invalid_argument("fit_least_squares: fewer points than parameters");

    double lambda = 1e-3;
    double ssr = chi2(x, y, model, params);
    FitResult res;
    std::vector<double> jac(np);
    std::vector<std::vector<double>> jtj(np, std::vector<double>(np));
    std::vector<double> jtr(np);

    for (res.iterations = 1; res.iterations <= kMaxIterations; ++res.iterations) {
        for (auto& row : jtj) std::fill(row.begin(), row.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            double f;
            model(x[i], params, f, jac);
            const double r = y[i] - f;
            for (size_t a = 0; a < np; ++a) {
                jtr[a] += jac[a] * r;
                for (size_t b = a; b < np; ++b) jtj[a][b] += jac[a] * jac[b];
            }
        }
        for (size_t a = 0; a < np; ++a)
            for (size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        bool stepped = false;
        for (int damp_try = 0; damp_try < 40; ++damp_try) {
            auto damped = jtj;
            for (size_t a = 0; a < np; ++a)
                damped[a][a] += lambda * (jtj[a][a] > 0.0 ? jtj[a][a] : 1.0);
            std::vector<double> step;
            if (!solve_spd(damped, jtr, step)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = params;
            for (size_t a = 0; a < np; ++a) trial[a] += step[a];
            const double trial_ssr = chi2(x, y, model, trial);
            if (trial_ssr <= ssr || !std::isfinite(ssr)) {
                double rel_step = 0.0;
                for (size_t a = 0; a < np; ++a) {
                    const double scale = std::max(std::abs(params[a]), 1e-30);
                    rel_step = std::max(rel_step, std::abs(step[a]) / scale);
                }
                params = std::move(trial);
                ssr = trial_ssr;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                if (rel_step < kStepTol) res.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // Damping exhausted without descent: already at (or numerically
            // stuck near) a minimum.
            res.converged = ssr < std::numeric_limits<double>::infinity();
            break;
        }
        if (res.converged) break;
    }

    res.params = params;
    res.residual_norm = std::sqrt(ssr);
    if (!res.converged)
        throw fit_failure("fit did not converge in " +
                              std::to_string(kMaxIterations) + " iterations",
                          res.residual_norm);

    // Linearized covariance: sigma^2 (J^T J)^-1 with sigma^2 = SSR / (n - p).
    for (auto& row : jtj) std::fill(row.begin(), row.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
        double f;
        model(x[i], params, f, jac);
        for (size_t a = 0; a < np; ++a)
            for (size_t b = a; b < np; ++b) jtj[a][b] += jac[a] * jac[b];
    }
    for (size_t a = 0; a < np; ++a)
        for (size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    const double dof = n > np ? static_cast<double>(n - np) : 1.0;
    const double var = ssr / dof;
    res.sigma.assign(np, std::numeric_limits<double>::infinity());
    if (invert_spd(jtj, res.covariance)) {
        for (size_t a = 0; a < np; ++a) {
            // (J^T J)^-1_aa * (J^T J)_aa blows up when the data leave the
            // parameter unconstrained, regardless of the residual scale.
            const double inflation = res.covariance[a][a] * jtj[a][a];
            if (!std::isfinite(inflation) || inflation > 1e12)
                res.degenerate = true;
            for (size_t b = 0; b < np; ++b) res.covariance[a][b] *= var;
            const double v = res.covariance[a][a];
            res.sigma[a] = v >= 0.0 && std::isfinite(v)
                               ? std::sqrt(v)
                               : std::numeric_limits<double>::infinity();
            if (!std::isfinite(res.sigma[a])) res.degenerate = true;
        }
    } else {
        res.degenerate = true;
        res.covariance.assign(np, std::vector<double>(
                                      np, std::numeric_limits<double>::infinity()));
    }
    return res;
}

}  // namespace router
