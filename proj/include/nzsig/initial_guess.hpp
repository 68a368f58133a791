#pragma once

#include <string>
#include <vector>

#include "nzsig/game_model.hpp"
#include "nzsig/grid.hpp"
#include "nzsig/howard.hpp"
#include "nzsig/policy_iteration.hpp"

namespace nzsig {

struct UnilateralResult {
    Field v;
    HowardResult solve;
    std::vector<std::string> warnings;
};

/// Value of the single-player impulse control problem in which the opponent
/// never intervenes, solved on the whole grid with homogeneous Neumann
/// conditions.  Throws SolverError when the policy iteration does not settle.
UnilateralResult unilateral_value(const GameSpec& game, Player active, const Grid& grid, const HowardConfig& inner);

FieldPair unilateral_pair(const GameSpec& game, const Grid& grid, const HowardConfig& inner);

enum class CappedGuess { zero, unilateral };

struct StagedGuess {
    FieldPair v;
    SolveResult capped;
};

/// Solves the capped variant of the benchmark and returns its value pair as
/// a starting point for the benchmark itself.  An unconverged capped solve
/// is returned as is and flagged through `capped.converged`.
StagedGuess staged_benchmark_guess(const BenchmarkParams& params, double cap, const Grid& grid,
                                   const SolverConfig& config, CappedGuess capped_guess = CappedGuess::zero);

}  // namespace nzsig
