#include "nzsig/initial_guess.hpp"

#include <algorithm>
#include <sstream>

#include "nzsig/errors.hpp"

namespace nzsig {

UnilateralResult unilateral_value(const GameSpec& game, Player active, const Grid& grid, const HowardConfig& inner) {
    const GameSpec flat = with_zero_slopes(game);
    const DiscreteGenerator gen = build_generator(grid, flat, active);
    const Field payoff = discrete_payoff(grid, flat, active, gen);
    const std::vector<bool> everywhere(grid.size(), true);
    const Field unused(grid.size(), 0.0);
    const SubProblem sp = restrict_subproblem(grid, gen, flat.player(active).rho, payoff, everywhere, unused,
                                              flat.player(active).cost);

    UnilateralResult out;
    const Field raw = grid.sample(game.player(active).payoff);
    const auto top = std::max_element(raw.begin(), raw.end());
    if (top == raw.begin() || top == raw.end() - 1) {
        out.warnings.push_back("payoff of player " + std::to_string(number(active)) +
                               " peaks at the edge of the grid; the unilateral problem may be ill-posed");
    }

    out.solve = solve_howard(sp, Field(grid.size(), 0.0), inner);
    if (!out.solve.converged) {
        std::ostringstream os;
        os << "unilateral solve for player " << number(active) << " did not converge in " << out.solve.iterations
           << " iterations (last step " << out.solve.final_step_norm << ")";
        throw SolverError(os.str());
    }
    out.v = out.solve.v;
    return out;
}

FieldPair unilateral_pair(const GameSpec& game, const Grid& grid, const HowardConfig& inner) {
    return {unilateral_value(game, Player::first, grid, inner).v, unilateral_value(game, Player::second, grid, inner).v};
}

StagedGuess staged_benchmark_guess(const BenchmarkParams& params, double cap, const Grid& grid,
                                   const SolverConfig& config, CappedGuess capped_guess) {
    const GameSpec capped = build_capped({params, cap});
    FieldPair v0{Field(grid.size(), 0.0), Field(grid.size(), 0.0)};
    if (capped_guess == CappedGuess::unilateral) {
        try {
            v0 = unilateral_pair(capped, grid, config.inner);
        } catch (const SolverError& e) {
            throw SolverError(std::string("staged guess, unilateral capped stage: ") + e.what());
        }
    }
    StagedGuess out;
    try {
        out.capped = solve_system(capped, grid, std::move(v0), config);
    } catch (const SolverError& e) {
        throw SolverError(std::string("staged guess, capped system stage: ") + e.what());
    }
    out.v = out.capped.v;
    return out;
}

}  // namespace nzsig
