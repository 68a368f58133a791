#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nzsig/game_model.hpp"
#include "nzsig/grid.hpp"
#include "nzsig/howard.hpp"

namespace nzsig {

using FieldPair = std::array<Field, 2>;

enum class UpdateOrder {
    jacobi,        // both players read iterate k of the opponent
    gauss_seidel,  // player 2 reads player 1's freshly updated iterate
};

/// Where the gain and PDE terms of the system residual are evaluated.
enum class ResidualPlacement {
    /// Gain relation on the opponent's intervention set, PDE relation on the
    /// opponent's continuation set (consistent with the update rule).
    system,
    /// Indicators swapped, reproducing the residual formula as printed.
    verbatim,
};

struct SolverConfig {
    double eps = 1e-8;
    double alpha = 0.8;
    double r0 = 1.0;
    int k_max = 1000;
    HowardConfig inner{};
    UpdateOrder order = UpdateOrder::jacobi;
    ResidualPlacement residual = ResidualPlacement::system;
    ObstacleCap cap = ObstacleCap::with_cost;
};

void validate(const SolverConfig& config);

enum class ResidualKind : std::uint8_t { none, obstacle, gain, pde_max };

const char* to_string(ResidualKind kind);

/// Per-node, per-player largest residual term and which relation produced it.
struct ResidualBreakdown {
    std::array<Field, 2> value;
    std::array<std::vector<ResidualKind>, 2> kind;
    double max = 0.0;
    Player worst_player = Player::first;
    int worst_node = 0;
};

enum class SolveStatus { converged, max_iterations, degenerate };

const char* to_string(SolveStatus status);

struct SolveResult {
    FieldPair v;
    SolveStatus status = SolveStatus::max_iterations;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;    // R^1, ..., R^k
    std::vector<double> relaxation_history;  // r^0, ..., r^k
    ResidualBreakdown breakdown;             // of the returned pair
    long inner_iterations = 0;
    bool inner_all_converged = true;
    std::string message;
};

/// Relaxed policy iteration for the two-player system of QVIs.
SolveResult solve_system(const GameSpec& game, const Grid& grid, FieldPair v0, const SolverConfig& config);

ResidualBreakdown system_residual(const FieldPair& v, const Grid& grid, const GameSpec& game, double eps,
                                  ResidualPlacement placement = ResidualPlacement::system);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo < x && x < hi; }
};

/// Intervention zone [lo, hi] and the state the player moves to from it.
/// With delta_scale != 1 the impulse from x is delta_scale * (target - x).
struct ImpulseRegion {
    double lo = 0.0;
    double hi = 0.0;
    double target = 0.0;
    double delta_scale = 1.0;

    double destination(double x) const { return delta_scale == 1.0 ? target : x + delta_scale * (target - x); }
};

/// Threshold strategy: open continuation intervals plus impulse destinations
/// on their complement.  Grid-derived endpoints sit half a step between the
/// last continuation node and the first intervention node; intervals
/// touching the end of the grid are reported unbounded.
struct Strategy {
    std::vector<Interval> continuation;
    std::vector<std::pair<int, int>> continuation_nodes;  // inclusive node ranges
    std::vector<ImpulseRegion> impulses;

    bool in_continuation(double x) const;
    /// Destination of an intervention from x (nullopt inside the continuation set).
    std::optional<double> target(double x) const;
};

std::array<Strategy, 2> extract_equilibrium(const FieldPair& v, const Grid& grid, const GameSpec& game, double eps);

}  // namespace nzsig
