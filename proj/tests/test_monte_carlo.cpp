#include <doctest.h>

#include <cmath>
#include <limits>

#include "nzsig/errors.hpp"
#include "nzsig/monte_carlo.hpp"
#include "support.hpp"

using namespace nzsig;
namespace t = nzsig::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Strategy passive() {
    Strategy s;
    s.continuation = {{-kInf, kInf}};
    return s;
}

/// Continuation (-inf, b); from [b, inf) the state moves to `to`.
Strategy upper_barrier(double b, double to) {
    Strategy s;
    s.continuation = {{-kInf, b}};
    s.impulses = {{b, kInf, to}};
    return s;
}

/// Continuation (b, inf); from (-inf, b] the state moves to `to`.
Strategy lower_barrier(double b, double to) {
    Strategy s;
    s.continuation = {{b, kInf}};
    s.impulses = {{-kInf, b, to}};
    return s;
}

GameSpec deterministic_game(double mu) {
    GameSpec g = build_parabolic(t::parabolic_params());
    g.drift = [mu](double) { return mu; };
    g.volatility = [](double) { return 0.0; };
    return g;
}

/// Simpson rule for a smooth integrand on [a, b].
template <class F>
double simpson(F f, double a, double b, int pieces) {
    const double h = (b - a) / pieces;
    double sum = f(a) + f(b);
    for (int k = 1; k < pieces; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return sum * h / 3.0;
}

}  // namespace

TEST_SUITE("monte_carlo") {

TEST_CASE("configuration is validated") {
    SimConfig c;
    CHECK_NOTHROW(validate(c));
    c.horizon = 0.0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = SimConfig{};
    c.dt = 2000.0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = SimConfig{};
    c.paths = 0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = SimConfig{};
    c.max_interventions_per_instant = 0;
    CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("frozen dynamics keep the state constant") {
    const GameSpec game = deterministic_game(0.0);
    SimConfig c;
    c.horizon = 5.0;
    c.dt = 0.01;
    c.x0 = 0.3;
    const Trajectory tr = simulate(game, {passive(), passive()}, c);
    CHECK(tr.times.size() == 501);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 5.0);
    for (double x : tr.states) REQUIRE(x == 0.3);
    CHECK(tr.interventions.empty());
}

TEST_CASE("constant payoff integrates to the discounted horizon") {
    GameSpec game = build_parabolic(t::parabolic_params());
    for (PlayerSpec& p : game.players) p.payoff = [](double) { return 1.0; };
    SimConfig c;
    c.horizon = 100.0;
    c.dt = 1e-3;
    c.paths = 5;
    const ObjectiveEstimate e = estimate_objective(game, {passive(), passive()}, c);
    const double rho = game.players[0].rho;
    const double exact = (1.0 - std::exp(-rho * c.horizon)) / rho;
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(e.player[i].mean - exact) <= c.dt);
        CHECK(e.player[i].std_error <= 1e-9);
    }
    CHECK(e.interventions == 0);
}

TEST_CASE("barrier mechanics") {
    const GameSpec game = deterministic_game(1.0);
    SimConfig c;
    c.horizon = 3.0;
    c.dt = 0.125;
    c.x0 = 0.0;
    const Trajectory tr = simulate(game, {upper_barrier(1.0, -0.5), passive()}, c);
    REQUIRE(tr.interventions.size() >= 1);
    const Intervention& first = tr.interventions.front();
    CHECK(first.time == 1.0);
    CHECK(first.player == Player::first);
    CHECK(first.pre_state == 1.0);
    CHECK(first.post_state == -0.5);
    CHECK(first.delta == -1.5);
    // Period of the saw-tooth: 1.5 time units.
    REQUIRE(tr.interventions.size() == 2);
    CHECK(tr.interventions[1].time == 2.5);
    for (const Intervention& iv : tr.interventions) CHECK(iv.post_state == iv.pre_state + iv.delta);
    for (double x : tr.states) CHECK(x < 1.0);
}

TEST_CASE("player 1 acts first") {
    const GameSpec game = deterministic_game(0.0);
    SimConfig c;
    c.horizon = 1.0;
    c.dt = 0.5;
    c.x0 = 2.0;
    // Both players want to act at x = 2; player 1 moves the state into both regions.
    const Trajectory tr = simulate(game, {upper_barrier(1.0, 0.0), upper_barrier(1.5, 0.2)}, c);
    REQUIRE(tr.interventions.size() == 1);
    CHECK(tr.interventions[0].player == Player::first);
    CHECK(tr.interventions[0].time == 0.0);
    CHECK(tr.states.front() == 0.0);
}

TEST_CASE("endless interventions hit the cap") {
    const GameSpec game = deterministic_game(0.0);
    SimConfig c;
    c.horizon = 1.0;
    c.dt = 0.5;
    c.x0 = 2.0;
    const StrategyPair pair{upper_barrier(1.0, -1.0), lower_barrier(0.0, 2.0)};
    CHECK_THROWS_WITH_AS(simulate(game, pair, c), doctest::Contains("more than 10 interventions"), SolverError);
}

TEST_CASE("targets must lie in the own continuation set") {
    const GameSpec game = deterministic_game(0.0);
    CHECK_THROWS_AS(simulate(game, {upper_barrier(1.0, 3.0), passive()}, SimConfig{}), ValidationError);
}

TEST_CASE("deterministic path agrees with a quadrature oracle") {
    const double mu = 0.5;
    const double b = 1.0;
    const double to = -1.5;
    const GameSpec game = deterministic_game(mu);
    SimConfig c;
    c.horizon = 60.0;
    c.dt = 1e-3;
    c.x0 = -1.0;
    c.paths = 1;
    const ObjectiveEstimate e = estimate_objective(game, {upper_barrier(b, to), passive()}, c);

    // Exact saw-tooth: first hit after (b - x0)/mu, then every (b - to)/mu.
    const double first = (b - c.x0) / mu;
    const double period = (b - to) / mu;
    for (int i = 0; i < 2; ++i) {
        const PlayerSpec& ps = game.players[i];
        auto integrand = [&](double t, double start) { return std::exp(-ps.rho * t) * ps.payoff(start + mu * t); };
        double total = simpson([&](double s) { return integrand(s, c.x0); }, 0.0, first, 4000);
        for (double tau = first; tau < c.horizon; tau += period) {
            const double end = std::min(tau + period, c.horizon);
            total += simpson([&](double s) { return std::exp(-ps.rho * tau) * integrand(s, to); }, 0.0, end - tau, 4000);
            const double transfer = i == 0 ? ps.cost(b, to - b) : ps.gain(b, to - b);
            total += std::exp(-ps.rho * tau) * transfer;
        }
        // Left rectangles and grid-time detection both cost O(dt).
        CHECK(std::abs(e.player[i].mean - total) <= 50.0 * c.dt);
    }
}

TEST_CASE("paths are reproducible and seed dependent") {
    const GameSpec game = build_parabolic(t::parabolic_params());
    SimConfig c;
    c.horizon = 20.0;
    c.dt = 0.01;
    c.seed = 42;
    const StrategyPair pair{upper_barrier(1.0, -1.8), lower_barrier(-3.0, -0.1)};
    const Trajectory a = simulate(game, pair, c, 3);
    const Trajectory b = simulate(game, pair, c, 3);
    CHECK(a.states == b.states);
    CHECK(a.interventions.size() == b.interventions.size());
    const Trajectory other_path = simulate(game, pair, c, 4);
    CHECK(a.states != other_path.states);
    c.seed = 43;
    CHECK(simulate(game, pair, c, 3).states != a.states);

    c.paths = 20;
    c.seed = 42;
    const ObjectiveEstimate e1 = estimate_objective(game, pair, c);
    const ObjectiveEstimate e2 = estimate_objective(game, pair, c);
    CHECK(e1.player[0].mean == e2.player[0].mean);
    CHECK(e1.player[1].std_error == e2.player[1].std_error);
}

TEST_CASE("objective bookkeeping matches the recorded path") {
    const GameSpec game = build_parabolic(t::parabolic_params());
    SimConfig c;
    c.horizon = 50.0;
    c.dt = 0.01;
    c.seed = 9;
    c.paths = 1;
    const StrategyPair pair{upper_barrier(1.0, -1.8), lower_barrier(-3.0, -0.1)};
    const Trajectory tr = simulate(game, pair, c, 0);
    const auto direct = path_objective(game, tr);
    const ObjectiveEstimate e = estimate_objective(game, pair, c);
    CHECK(e.interventions == static_cast<long>(tr.interventions.size()));
    CHECK(tr.interventions.size() > 0);
    for (int i = 0; i < 2; ++i) {
        CHECK(e.player[i].mean == doctest::Approx(direct[i]).epsilon(1e-11));
        CHECK(e.player[i].std_error == 0.0);
    }
    for (const Intervention& iv : tr.interventions) {
        CHECK(iv.post_state == iv.pre_state + iv.delta);
        CHECK_FALSE(pair[index(iv.player)].in_continuation(iv.pre_state));
    }
}

TEST_CASE("perturbation") {
    const Strategy s = upper_barrier(1.0, -1.8);
    const Strategy same = perturb_strategy(s, 0.0, 5);
    CHECK(same.continuation[0].hi == 1.0);
    CHECK(same.impulses[0].target == -1.8);
    CHECK_THROWS_AS(perturb_strategy(s, 1.0, 5), ValidationError);
    CHECK_THROWS_AS(perturb_strategy(s, -0.1, 5), ValidationError);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Strategy p = perturb_strategy(s, 0.25, seed);
        const double hi = p.continuation[0].hi;
        CHECK(hi >= 0.75);
        CHECK(hi <= 1.25);
        CHECK(std::isinf(p.continuation[0].lo));
        CHECK(p.impulses[0].lo == hi);
        CHECK(p.impulses[0].target / -1.8 >= 0.75);
        CHECK(p.impulses[0].target / -1.8 <= 1.25);
        CHECK(p.in_continuation(p.impulses[0].target));
    }
    const Strategy a = perturb_strategy(s, 0.25, 17);
    const Strategy b = perturb_strategy(s, 0.25, 17);
    CHECK(a.continuation[0].hi == b.continuation[0].hi);
    CHECK(a.impulses[0].target == b.impulses[0].target);

    const Strategy d = perturb_strategy(s, 0.25, 17, PerturbMode::delta);
    CHECK(d.impulses[0].target == -1.8);
    CHECK(d.impulses[0].delta_scale != 1.0);
    const double x = d.continuation[0].hi;
    CHECK(*d.target(x) == doctest::Approx(x + d.impulses[0].delta_scale * (-1.8 - x)));
}

}
