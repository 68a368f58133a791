#include "nzsig/howard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nzsig/errors.hpp"

namespace nzsig {

void validate(const HowardConfig& config) {
    if (!(config.tol > 0.0)) throw ValidationError("inner tolerance must be positive");
    if (config.k_max < 1) throw ValidationError("inner k_max must be >= 1");
}

Field solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                        std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t p = 0; p < n; ++p) {
        if (p > 0) {
            const double w = lower[p] / diag[p - 1];
            diag[p] -= w * upper[p - 1];
            rhs[p] -= w * rhs[p - 1];
        }
        if (!(std::abs(diag[p]) > 0.0) || !std::isfinite(diag[p])) {
            throw SolverError("singular linear system (zero pivot at row " + std::to_string(p) + ")");
        }
    }
    Field out(n);
    for (std::size_t p = n; p-- > 0;) {
        double acc = rhs[p];
        if (p + 1 < n) acc -= upper[p] * out[p + 1];
        out[p] = acc / diag[p];
    }
    return out;
}

HowardResult solve_howard(const SubProblem& problem, std::span<const double> v0, const HowardConfig& config) {
    validate(config);
    const std::size_t n = problem.size();
    if (v0.size() != n) throw ValidationError("initial guess does not match subgrid size");

    HowardResult res;
    res.v.assign(v0.begin(), v0.end());
    res.policy.assign(n, 0);

    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    while (res.iterations < config.k_max) {
        const Field obstacle = problem.obstacle(res.v);
        const Field lv = problem.apply_linear(res.v);
        for (std::size_t p = 0; p < n; ++p) {
            const bool intervene = lv[p] + problem.source[p] < obstacle[p] - res.v[p];
            res.policy[p] = intervene ? 1 : 0;
            if (intervene) {
                lower[p] = 0.0;
                diag[p] = -1.0;
                upper[p] = 0.0;
                rhs[p] = -obstacle[p];
            } else {
                lower[p] = problem.lower[p];
                diag[p] = problem.diag[p];
                upper[p] = problem.upper[p];
                rhs[p] = -problem.source[p];
            }
        }
        Field next = solve_tridiagonal(lower, diag, upper, rhs);

        double step = 0.0;
        for (std::size_t p = 0; p < n; ++p) step = std::max(step, std::abs(next[p] - res.v[p]));
        res.v = std::move(next);
        res.final_step_norm = step;
        ++res.iterations;
        if (step <= config.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double qvi_residual(const SubProblem& problem, std::span<const double> v) {
    const Field obstacle = problem.obstacle(v);
    const Field lv = problem.apply_linear(v);
    double worst = 0.0;
    for (std::size_t p = 0; p < problem.size(); ++p) {
        worst = std::max(worst, std::abs(std::max(lv[p] + problem.source[p], obstacle[p] - v[p])));
    }
    return worst;
}

}  // namespace nzsig
