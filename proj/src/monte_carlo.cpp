#include "nzsig/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nzsig/errors.hpp"

namespace nzsig {
namespace {

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

long step_count(const SimConfig& config) {
    return std::max(1L, static_cast<long>(std::ceil(config.horizon / config.dt - 1e-9)));
}

double step_time(const SimConfig& config, long n, long steps) {
    return n >= steps ? config.horizon : static_cast<double>(n) * config.dt;
}

void check_strategies(const StrategyPair& strategies) {
    for (Player p : {Player::first, Player::second}) {
        const Strategy& s = strategies[index(p)];
        for (const ImpulseRegion& region : s.impulses) {
            if (region.delta_scale == 1.0 && !s.in_continuation(region.target)) {
                std::ostringstream os;
                os << "strategy of player " << number(p) << " moves the state to " << region.target
                   << ", outside its own continuation set";
                throw ValidationError(os.str());
            }
        }
    }
}

/// Applies the interventions due at time t, player 1 first.
template <class OnIntervention>
double intervene(double x, double t, const StrategyPair& strategies, int cap, OnIntervention&& on_intervention) {
    for (int count = 0;; ++count) {
        Player actor;
        if (!strategies[0].in_continuation(x)) {
            actor = Player::first;
        } else if (!strategies[1].in_continuation(x)) {
            actor = Player::second;
        } else {
            return x;
        }
        if (count >= cap) {
            std::ostringstream os;
            os << "more than " << cap << " interventions at time " << t << " (state " << x << ")";
            throw SolverError(os.str());
        }
        const auto destination = strategies[index(actor)].target(x);
        if (!destination) {
            std::ostringstream os;
            os << "player " << number(actor) << " has no impulse defined at state " << x;
            throw ValidationError(os.str());
        }
        on_intervention(Intervention{t, actor, *destination - x, x, *destination});
        x = *destination;
    }
}

/// Walks one Euler-Maruyama path, reporting the post-intervention state at
/// every grid time together with the width of the step that follows it.
template <class OnStep, class OnIntervention>
void walk_path(const GameSpec& game, const StrategyPair& strategies, const SimConfig& config, std::uint64_t path,
               OnStep&& on_step, OnIntervention&& on_intervention) {
    std::mt19937_64 engine = path_engine(config.seed, path);
    std::normal_distribution<double> normal;
    const long steps = step_count(config);
    const int cap = config.max_interventions_per_instant;

    double x = intervene(config.x0, 0.0, strategies, cap, on_intervention);
    for (long n = 0; n < steps; ++n) {
        const double t = step_time(config, n, steps);
        const double width = step_time(config, n + 1, steps) - t;
        on_step(t, x, width);
        x += game.drift(x) * width + game.volatility(x) * std::sqrt(width) * normal(engine);
        x = intervene(x, step_time(config, n + 1, steps), strategies, cap, on_intervention);
    }
    on_step(config.horizon, x, 0.0);
}

}  // namespace

void validate(const SimConfig& config) {
    if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) throw ValidationError("horizon T must be positive");
    if (!(config.dt > 0.0) || !(config.dt <= config.horizon)) throw ValidationError("time step must satisfy 0 < dt <= T");
    if (config.paths < 1) throw ValidationError("number of paths N must be >= 1");
    if (!std::isfinite(config.x0)) throw ValidationError("x0 must be finite");
    if (config.max_interventions_per_instant < 1) throw ValidationError("intervention cap must be >= 1");
}

Trajectory simulate(const GameSpec& game, const StrategyPair& strategies, const SimConfig& config,
                    std::uint64_t path) {
    validate(config);
    check_strategies(strategies);
    Trajectory out;
    const auto expected = static_cast<std::size_t>(step_count(config)) + 1;
    out.times.reserve(expected);
    out.states.reserve(expected);
    walk_path(
        game, strategies, config, path,
        [&](double t, double x, double) {
            out.times.push_back(t);
            out.states.push_back(x);
        },
        [&](const Intervention& iv) { out.interventions.push_back(iv); });
    return out;
}

ObjectiveEstimate estimate_objective(const GameSpec& game, const StrategyPair& strategies, const SimConfig& config) {
    validate(config);
    check_strategies(strategies);

    std::array<double, 2> decay{};
    for (Player p : {Player::first, Player::second}) decay[index(p)] = std::exp(-game.player(p).rho * config.dt);

    ObjectiveEstimate out;
    std::array<double, 2> sum{};
    std::array<double, 2> sum_sq{};
    for (int path = 0; path < config.paths; ++path) {
        std::array<double, 2> total{};
        std::array<double, 2> discount{1.0, 1.0};
        long step = 0;
        walk_path(
            game, strategies, config, static_cast<std::uint64_t>(path),
            [&](double t, double x, double width) {
                if (width <= 0.0) return;
                const bool refresh = step++ % 4096 == 0;
                for (int i = 0; i < 2; ++i) {
                    if (refresh) discount[i] = std::exp(-game.players[i].rho * t);
                    total[i] += discount[i] * game.players[i].payoff(x) * width;
                    discount[i] *= decay[i];
                }
            },
            [&](const Intervention& iv) {
                ++out.interventions;
                const int actor = index(iv.player);
                for (int i = 0; i < 2; ++i) {
                    const PlayerSpec& ps = game.players[i];
                    const double transfer = i == actor ? ps.cost(iv.pre_state, iv.delta) : ps.gain(iv.pre_state, iv.delta);
                    total[i] += std::exp(-ps.rho * iv.time) * transfer;
                }
            });
        for (int i = 0; i < 2; ++i) {
            sum[i] += total[i];
            sum_sq[i] += total[i] * total[i];
        }
    }

    const double n = config.paths;
    for (int i = 0; i < 2; ++i) {
        const double mean = sum[i] / n;
        out.player[i].mean = mean;
        if (config.paths > 1) {
            const double var = std::max(0.0, (sum_sq[i] - n * mean * mean) / (n - 1.0));
            out.player[i].std_error = std::sqrt(var / n);
        }
    }
    return out;
}

std::array<double, 2> path_objective(const GameSpec& game, const Trajectory& trajectory) {
    std::array<double, 2> total{};
    for (std::size_t k = 0; k + 1 < trajectory.times.size(); ++k) {
        const double t = trajectory.times[k];
        const double width = trajectory.times[k + 1] - t;
        for (int i = 0; i < 2; ++i) {
            total[i] += std::exp(-game.players[i].rho * t) * game.players[i].payoff(trajectory.states[k]) * width;
        }
    }
    for (const Intervention& iv : trajectory.interventions) {
        for (int i = 0; i < 2; ++i) {
            const PlayerSpec& ps = game.players[i];
            const double transfer =
                i == index(iv.player) ? ps.cost(iv.pre_state, iv.delta) : ps.gain(iv.pre_state, iv.delta);
            total[i] += std::exp(-ps.rho * iv.time) * transfer;
        }
    }
    return total;
}

Strategy perturb_strategy(const Strategy& strategy, double magnitude, std::uint64_t seed, PerturbMode mode) {
    if (!(magnitude >= 0.0 && magnitude < 1.0)) throw ValidationError("perturbation magnitude must lie in [0, 1)");
    if (magnitude == 0.0) return strategy;

    std::mt19937_64 engine = path_engine(seed, ~std::uint64_t{0});
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::bernoulli_distribution plus(0.5);
    auto factor = [&] {
        const double u = uniform(engine);
        return plus(engine) ? 1.0 + magnitude * u : 1.0 - magnitude * u;
    };
    auto scaled = [&](double e) { return std::isfinite(e) ? e * factor() : e; };

    constexpr int kAttempts = 100;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        Strategy out;
        std::vector<std::pair<double, double>> moved;  // old endpoint -> new endpoint
        for (const Interval& c : strategy.continuation) {
            const Interval next{scaled(c.lo), scaled(c.hi)};
            if (std::isfinite(c.lo)) moved.emplace_back(c.lo, next.lo);
            if (std::isfinite(c.hi)) moved.emplace_back(c.hi, next.hi);
            out.continuation.push_back(next);
        }
        auto relocate = [&](double edge) {
            for (const auto& [from, to] : moved) {
                if (from == edge) return to;
            }
            return edge;
        };
        for (const ImpulseRegion& region : strategy.impulses) {
            ImpulseRegion next = region;
            next.lo = relocate(region.lo);
            next.hi = relocate(region.hi);
            if (mode == PerturbMode::target) {
                next.target = region.target * factor();
            } else {
                next.delta_scale = region.delta_scale * factor();
            }
            out.impulses.push_back(next);
        }

        bool ok = true;
        for (std::size_t k = 0; k < out.continuation.size() && ok; ++k) {
            ok = out.continuation[k].lo < out.continuation[k].hi &&
                 (k == 0 || out.continuation[k - 1].hi <= out.continuation[k].lo);
        }
        for (const ImpulseRegion& region : out.impulses) {
            if (!ok) break;
            // Land inside the continuation set from the finite edge of the zone.
            const double edge = std::isfinite(region.lo) ? region.lo : region.hi;
            ok = std::isfinite(edge) && out.in_continuation(region.destination(edge)) &&
                 out.in_continuation(region.destination(std::isfinite(region.hi) ? region.hi : region.lo));
        }
        if (ok) return out;
    }
    throw ValidationError("perturb_strategy: no admissible perturbation found in 100 draws");
}

}  // namespace nzsig
