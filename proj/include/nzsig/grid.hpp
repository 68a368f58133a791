#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nzsig/game_model.hpp"

namespace nzsig {

using Field = std::vector<double>;

/// Equispaced mesh x_k = x_min + k*h, k = 0..steps.
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int steps = 0;
    double h = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(steps) + 1; }
    double node(std::size_t k) const {
        return k == static_cast<std::size_t>(steps) ? x_max : x_min + static_cast<double>(k) * h;
    }
    std::vector<double> nodes() const;
    Field sample(const ScalarFn& fn) const;
};

Grid build_grid(double x_min, double x_max, int steps);

/// Piecewise-linear interpolant of a grid field, clamped outside the grid.
double interpolate(const Grid& grid, std::span<const double> v, double x);

/// Tridiagonal discretisation of mu d/dx + sigma^2/2 d^2/dx^2 with the
/// ghost nodes eliminated through the player's Neumann slopes.  The constant
/// terms produced by the elimination live in `bc_correction` (nonzero only in
/// the first and last rows).
struct DiscreteGenerator {
    std::vector<double> lower;  // coefficient of V[k-1] in row k (lower[0] == 0)
    std::vector<double> diag;
    std::vector<double> upper;  // coefficient of V[k+1] in row k (upper[n-1] == 0)
    Field bc_correction;

    std::size_t size() const { return diag.size(); }
    double entry(std::size_t row, std::size_t col) const;
    Field apply(std::span<const double> v) const;
};

DiscreteGenerator build_generator(const Grid& grid, const GameSpec& game, Player player);

/// Running payoff on the grid, corrected at the two boundary rows.
Field discrete_payoff(const Grid& grid, const GameSpec& game, Player player, const DiscreteGenerator& generator);

/// For sources (xs, vs) and queries qs, both sorted by coordinate:
/// values[p] = max_s vs[s] + slope * |xs[s] - qs[p]|, arg[p] the smallest
/// maximising source position.  Linear time.
struct MaxPlusResult {
    Field values;
    std::vector<int> arg;
};

MaxPlusResult max_plus_abs(std::span<const double> xs, std::span<const double> vs, std::span<const double> qs,
                           double slope);

/// Discrete loss operator: values[k] = max_y V(y) + cost(x_k, y - x_k), with
/// target[k] the smallest maximising node index.
struct LossResult {
    Field values;
    std::vector<int> target;
};

LossResult loss_operator(const Grid& grid, std::span<const double> v, const ImpulseTransfer& cost);
LossResult loss_operator(const Grid& grid, std::span<const double> v, Player player, const GameSpec& game);

/// Value of player `player` after the opponent moves the state to the
/// opponent's loss-operator target, plus the compensation received.
Field gain_operator(const Grid& grid, std::span<const double> v, const LossResult& opponent_loss, Player player,
                    const GameSpec& game);

/// How nodes outside the subgrid enter the obstacle of the restricted QVI.
enum class ObstacleCap {
    /// Constant floor max_{y outside} H(y), as written in the algorithm listing.
    verbatim,
    /// Floor max_{y outside} H(y) + cost(x, y - x), i.e. the loss operator
    /// over the whole grid.
    with_cost,
};

/// Single QVI max{L V + g, max_y B^y V - V} = 0 posed on a subset of nodes.
struct SubProblem {
    std::vector<int> nodes;  // sorted grid indices of the subgrid
    std::vector<double> x;   // their coordinates
    std::vector<double> lower, diag, upper;  // L = A_KK - rho Id in subgrid order
    Field source;                            // g = f|_K + A_{K,S\K} H
    double cap = 0.0;                        // max H over the exterior, -inf if none
    Field floor;                             // per-node obstacle floor (cap or with_cost variant)
    ImpulseTransfer cost;

    std::size_t size() const { return nodes.size(); }
    Field apply_linear(std::span<const double> v) const;
    /// max_y B^y V at every subgrid node.
    Field obstacle(std::span<const double> v) const;
};

/// `in_subgrid[k]` selects K; `exterior` is read only outside K.
SubProblem restrict_subproblem(const Grid& grid, const DiscreteGenerator& generator, double rho,
                               std::span<const double> payoff, const std::vector<bool>& in_subgrid,
                               std::span<const double> exterior, const ImpulseTransfer& cost,
                               ObstacleCap mode = ObstacleCap::with_cost);

}  // namespace nzsig
