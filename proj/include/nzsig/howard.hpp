#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nzsig/grid.hpp"

namespace nzsig {

struct HowardConfig {
    double tol = 1e-10;  // sup-norm distance between consecutive iterates
    int k_max = 200;
};

void validate(const HowardConfig& config);

struct HowardResult {
    Field v;
    int iterations = 0;
    double final_step_norm = 0.0;
    std::vector<std::uint8_t> policy;  // 1 where the obstacle row is active
    bool converged = false;
};

/// Policy iteration for max{L V + g, max_y B^y V - V} = 0 on a subgrid.
///
/// Each sweep picks, node by node, the larger of the PDE residual and the
/// obstacle gap, then solves the resulting linear system exactly.  Rows of the
/// system are either the restricted stencil or identity rows, so a single
/// tridiagonal elimination suffices.  Exhausting `k_max` is reported through
/// `converged == false`; a singular system throws SolverError.
HowardResult solve_howard(const SubProblem& problem, std::span<const double> v0, const HowardConfig& config);

/// sup_K |max{L V + g, max_y B^y V - V}|
double qvi_residual(const SubProblem& problem, std::span<const double> v);

/// Solves a tridiagonal system in place (lower[0] and upper[n-1] ignored).
/// Throws SolverError on a vanishing pivot.
Field solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                        std::vector<double> rhs);

}  // namespace nzsig
