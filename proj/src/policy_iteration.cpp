#include "nzsig/policy_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nzsig/errors.hpp"

namespace nzsig {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<Player, 2> kPlayers{Player::first, Player::second};

/// Per-player discrete operators that do not change across iterations.
struct DiscreteGame {
    std::array<DiscreteGenerator, 2> generator;
    std::array<Field, 2> payoff;

    DiscreteGame(const Grid& grid, const GameSpec& game) {
        for (Player p : kPlayers) {
            generator[index(p)] = build_generator(grid, game, p);
            payoff[index(p)] = discrete_payoff(grid, game, p, generator[index(p)]);
        }
    }
};

std::vector<bool> continuation_mask(const LossResult& loss, std::span<const double> v, double threshold) {
    std::vector<bool> mask(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) mask[k] = loss.values[k] - v[k] < -threshold;
    return mask;
}

ResidualBreakdown residual_impl(const FieldPair& v, const Grid& grid, const GameSpec& game, const DiscreteGame& dg,
                                double eps, ResidualPlacement placement) {
    const std::size_t n = grid.size();
    const std::array<LossResult, 2> loss{loss_operator(grid, v[0], Player::first, game),
                                         loss_operator(grid, v[1], Player::second, game)};

    ResidualBreakdown out;
    out.max = 0.0;
    for (Player pi : kPlayers) {
        const int i = index(pi);
        const int j = index(opponent(pi));
        const auto opp_cont = continuation_mask(loss[j], v[j], eps);
        const Field gain = gain_operator(grid, v[i], loss[j], pi, game);
        const Field av = dg.generator[i].apply(v[i]);
        const double rho = game.player(pi).rho;

        out.value[i].assign(n, 0.0);
        out.kind[i].assign(n, ResidualKind::none);
        for (std::size_t k = 0; k < n; ++k) {
            const double gap = loss[i].values[k] - v[i][k];
            double best = std::max(gap, 0.0);
            ResidualKind kind = best > 0.0 ? ResidualKind::obstacle : ResidualKind::none;

            const bool pde_here = placement == ResidualPlacement::system ? opp_cont[k] : !opp_cont[k];
            double term = 0.0;
            ResidualKind term_kind = ResidualKind::none;
            if (pde_here) {
                term = std::abs(std::max(av[k] - rho * v[i][k] + dg.payoff[i][k], gap));
                term_kind = ResidualKind::pde_max;
            } else {
                term = std::abs(gain[k] - v[i][k]);
                term_kind = ResidualKind::gain;
            }
            if (term > best) {
                best = term;
                kind = term_kind;
            }
            out.value[i][k] = best;
            out.kind[i][k] = kind;
            if (best > out.max) {
                out.max = best;
                out.worst_player = pi;
                out.worst_node = static_cast<int>(k);
            }
        }
    }
    return out;
}

void check_pair(const FieldPair& v, const Grid& grid, const char* what) {
    for (const Field& f : v) {
        if (f.size() != grid.size()) throw ValidationError(std::string(what) + ": field size does not match grid");
        for (double x : f) {
            if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite entry");
        }
    }
}

}  // namespace

void validate(const SolverConfig& config) {
    if (!(config.eps > 0.0)) throw ValidationError("eps must be positive");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    if (!(config.r0 >= config.eps)) throw ValidationError("r0 must be >= eps");
    if (config.k_max < 1) throw ValidationError("k_max must be >= 1");
    validate(config.inner);
}

const char* to_string(ResidualKind kind) {
    switch (kind) {
        case ResidualKind::none: return "none";
        case ResidualKind::obstacle: return "obstacle";
        case ResidualKind::gain: return "gain";
        case ResidualKind::pde_max: return "pde_max";
    }
    return "?";
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::degenerate: return "degenerate";
    }
    return "?";
}

ResidualBreakdown system_residual(const FieldPair& v, const Grid& grid, const GameSpec& game, double eps,
                                  ResidualPlacement placement) {
    check_pair(v, grid, "system_residual");
    const DiscreteGame dg(grid, game);
    return residual_impl(v, grid, game, dg, eps, placement);
}

SolveResult solve_system(const GameSpec& game, const Grid& grid, FieldPair v0, const SolverConfig& config) {
    validate(config);
    check_pair(v0, grid, "solve_system");
    const std::size_t n = grid.size();
    const DiscreteGame dg(grid, game);

    SolveResult res;
    res.v = std::move(v0);
    double r = config.r0;
    res.relaxation_history.push_back(r);

    while (res.iterations < config.k_max) {
        FieldPair next = res.v;
        for (Player pi : kPlayers) {
            const int i = index(pi);
            const int j = index(opponent(pi));
            const Field& vj = (config.order == UpdateOrder::gauss_seidel && pi == Player::second) ? next[j] : res.v[j];
            const Field& vi = res.v[i];

            const LossResult loss_j = loss_operator(grid, vj, opponent(pi), game);
            const auto opp_cont = continuation_mask(loss_j, vj, r);
            if (std::none_of(opp_cont.begin(), opp_cont.end(), [](bool b) { return b; })) {
                res.status = SolveStatus::degenerate;
                std::ostringstream os;
                os << "player " << number(opponent(pi)) << " intervenes at every node (iteration "
                   << res.iterations + 1 << ", r = " << r << ")";
                res.message = os.str();
                res.breakdown = residual_impl(res.v, grid, game, dg, config.eps, config.residual);
                return res;
            }

            const Field gain = gain_operator(grid, vi, loss_j, pi, game);
            const SubProblem sp = restrict_subproblem(grid, dg.generator[i], game.player(pi).rho, dg.payoff[i],
                                                      opp_cont, gain, game.player(pi).cost, config.cap);
            Field guess(sp.size());
            for (std::size_t p = 0; p < sp.size(); ++p) guess[p] = vi[static_cast<std::size_t>(sp.nodes[p])];

            HowardResult inner;
            try {
                inner = solve_howard(sp, guess, config.inner);
            } catch (const SolverError& e) {
                std::ostringstream os;
                os << "inner solve failed for player " << number(pi) << " at iteration " << res.iterations + 1
                   << ": " << e.what();
                throw SolverError(os.str());
            }
            res.inner_iterations += inner.iterations;
            res.inner_all_converged = res.inner_all_converged && inner.converged;

            Field& out = next[i];
            for (std::size_t k = 0; k < n; ++k) out[k] = gain[k];
            for (std::size_t p = 0; p < sp.size(); ++p) out[static_cast<std::size_t>(sp.nodes[p])] = inner.v[p];
        }
        res.v = std::move(next);
        ++res.iterations;

        r = std::max(config.alpha * r, config.eps);
        res.relaxation_history.push_back(r);

        res.breakdown = residual_impl(res.v, grid, game, dg, config.eps, config.residual);
        res.residual_history.push_back(res.breakdown.max);
        if (res.breakdown.max <= config.eps) {
            res.status = SolveStatus::converged;
            res.converged = true;
            return res;
        }
    }
    res.status = SolveStatus::max_iterations;
    std::ostringstream os;
    os << "no convergence after " << res.iterations << " iterations; worst residual "
       << res.breakdown.max << " (player " << number(res.breakdown.worst_player) << ", node "
       << res.breakdown.worst_node << ")";
    res.message = os.str();
    return res;
}

bool Strategy::in_continuation(double x) const {
    return std::any_of(continuation.begin(), continuation.end(), [x](const Interval& c) { return c.contains(x); });
}

std::optional<double> Strategy::target(double x) const {
    if (in_continuation(x) || impulses.empty()) return std::nullopt;
    const ImpulseRegion* nearest = nullptr;
    double best = kInf;
    for (const auto& region : impulses) {
        const double d = x < region.lo ? region.lo - x : (x > region.hi ? x - region.hi : 0.0);
        if (d < best) {
            best = d;
            nearest = &region;
        }
    }
    return nearest->destination(x);
}

std::array<Strategy, 2> extract_equilibrium(const FieldPair& v, const Grid& grid, const GameSpec& game, double eps) {
    check_pair(v, grid, "extract_equilibrium");
    const std::size_t n = grid.size();
    auto lower_edge = [&](std::size_t k) { return k == 0 ? -kInf : 0.5 * (grid.node(k - 1) + grid.node(k)); };
    auto upper_edge = [&](std::size_t k) { return k + 1 == n ? kInf : 0.5 * (grid.node(k) + grid.node(k + 1)); };

    std::array<Strategy, 2> out;
    for (Player p : kPlayers) {
        const int i = index(p);
        const LossResult loss = loss_operator(grid, v[i], p, game);
        const auto cont = continuation_mask(loss, v[i], eps);
        Strategy& s = out[i];

        std::size_t k = 0;
        while (k < n) {
            std::size_t end = k;
            if (cont[k]) {
                while (end + 1 < n && cont[end + 1]) ++end;
                s.continuation.push_back({lower_edge(k), upper_edge(end)});
                s.continuation_nodes.emplace_back(static_cast<int>(k), static_cast<int>(end));
            } else {
                while (end + 1 < n && !cont[end + 1] && loss.target[end + 1] == loss.target[k]) ++end;
                s.impulses.push_back(
                    {lower_edge(k), upper_edge(end), grid.node(static_cast<std::size_t>(loss.target[k]))});
            }
            k = end + 1;
        }
    }
    return out;
}

}  // namespace nzsig
