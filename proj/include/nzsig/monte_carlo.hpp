#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nzsig/game_model.hpp"
#include "nzsig/policy_iteration.hpp"

namespace nzsig {

struct SimConfig {
    double horizon = 1000.0;
    double dt = 1e-3;
    int paths = 200;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    int max_interventions_per_instant = 10;
};

void validate(const SimConfig& config);

struct Intervention {
    double time = 0.0;
    Player player = Player::first;
    double delta = 0.0;
    double pre_state = 0.0;
    double post_state = 0.0;
};

/// Sampled path.  states[n] is the state at times[n] after any interventions
/// made at that instant.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;
    std::vector<Intervention> interventions;
};

using StrategyPair = std::array<Strategy, 2>;

/// Euler-Maruyama path number `path` of the stream defined by `config.seed`.
/// Interventions are checked after every step, player 1 first.
Trajectory simulate(const GameSpec& game, const StrategyPair& strategies, const SimConfig& config,
                    std::uint64_t path = 0);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct ObjectiveEstimate {
    std::array<Estimate, 2> player;
    long interventions = 0;  // over all paths
};

/// Truncated discounted objectives of both players, averaged over
/// `config.paths` independent paths.
ObjectiveEstimate estimate_objective(const GameSpec& game, const StrategyPair& strategies, const SimConfig& config);

/// Discounted objectives of a recorded path (left-rectangle running term).
std::array<double, 2> path_objective(const GameSpec& game, const Trajectory& trajectory);

enum class PerturbMode {
    target,  // rescale the destination coordinate
    delta,   // rescale the impulse size
};

/// Multiplies each finite continuation endpoint and each impulse destination
/// (or impulse size) by an independent factor 1 +- magnitude*U.  Draws that
/// leave a destination outside the perturbed continuation set are redrawn.
Strategy perturb_strategy(const Strategy& strategy, double magnitude, std::uint64_t seed,
                          PerturbMode mode = PerturbMode::target);

}  // namespace nzsig
