#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace nzsig {

using ScalarFn = std::function<double(double)>;

enum class Player : int { first = 0, second = 1 };

constexpr int index(Player p) { return static_cast<int>(p); }
constexpr Player opponent(Player p) { return p == Player::first ? Player::second : Player::first; }
constexpr int number(Player p) { return index(p) + 1; }

/// Intervention transfer of the form level(x) + per_unit * |delta|.
///
/// Used both for a player's own intervention cost (signed, added to the
/// objective, so typically negative) and for the gain a player receives when
/// the opponent intervenes.  Boundary conditions derived from the equilibrium
/// structure are only meaningful for this family.
struct ImpulseTransfer {
    ScalarFn level;
    double per_unit = 0.0;

    double operator()(double x, double delta) const { return level(x) + per_unit * std::abs(delta); }

    static ImpulseTransfer constant(double fixed, double per_unit) {
        return {[fixed](double) { return fixed; }, per_unit};
    }
};

/// Prescribed derivative of a value function at the two ends of the domain.
struct NeumannSlopes {
    double left = 0.0;
    double right = 0.0;
};

struct PlayerSpec {
    double rho = 0.0;
    ScalarFn payoff;
    ImpulseTransfer cost;
    ImpulseTransfer gain;
    NeumannSlopes slopes;
};

/// Data of a two-player nonzero-sum impulse game on the real line.
/// Immutable after construction.
struct GameSpec {
    std::string family;
    ScalarFn drift;
    ScalarFn volatility;
    std::array<PlayerSpec, 2> players;

    const PlayerSpec& player(Player p) const { return players[index(p)]; }
};

/// Linear benchmark game: Brownian state, payoffs (-1)^{i-1}(x - s_i), costs
/// c + lambda|delta| and compensations c_tilde + lambda_tilde|delta|.
struct BenchmarkParams {
    double sigma = 0.0;
    double rho = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double c = 0.0;
    double c_tilde = 0.0;
    double lambda = 0.0;
    double lambda_tilde = 0.0;
};

struct ParabolicParams {
    BenchmarkParams base;  // s1, s2 unused
    std::array<double, 2> root_left{};
    std::array<double, 2> root_right{};
};

struct CappedParams {
    BenchmarkParams base;
    double cap = 5.0;
};

void validate(const BenchmarkParams& params);
void validate(const ParabolicParams& params);
void validate(const CappedParams& params);

GameSpec build_benchmark(const BenchmarkParams& params);
GameSpec build_parabolic(const ParabolicParams& params);
GameSpec build_capped(const CappedParams& params);

/// Copy of `game` with homogeneous Neumann conditions for both players.
GameSpec with_zero_slopes(GameSpec game);

}  // namespace nzsig
