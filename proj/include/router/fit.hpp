#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace router {

struct fit_failure : std::runtime_error {
    double residual_norm;
    fit_failure(const std::string& msg, double rn)
        : std::runtime_error(msg), residual_norm(rn) {}
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> sigma;       // 1-sigma uncertainties (linearized)
    std::vector<std::vector<double>> covariance;
    double residual_norm = 0.0;      // sqrt(SSR)
    int iterations = 0;
    bool converged = false;
    // Set when J^T J was singular along some direction, i.e. a parameter is
    // unconstrained by the data; its sigma is reported as +inf.
    bool degenerate = false;
};

// model(x, params, f, jac_row): evaluates f and d f / d params at one x.
using ModelFn = std::function<void(double x, const std::vector<double>& params,
                                   double& f, std::vector<double>& jac_row)>;

// Damped Gauss-Newton (Levenberg-style adaptive damping) with analytic
// Jacobians.  Max 200 iterations, relative step tolerance 1e-10.
FitResult fit_least_squares(const std::vector<double>& x,
                            const std::vector<double>& y, ModelFn model,
                            std::vector<double> initial);

}  // namespace router
