#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "nzsig/game_model.hpp"
#include "nzsig/grid.hpp"

namespace nzsig::testing {

constexpr double kPi = 3.141592653589793;

/// Symmetric linear benchmark with proportional costs.
inline BenchmarkParams linear_params() {
    BenchmarkParams p;
    p.sigma = 0.15;
    p.rho = 0.02;
    p.s1 = -3.0;
    p.s2 = 3.0;
    p.c = 100.0;
    p.c_tilde = 0.0;
    p.lambda = 15.0;
    p.lambda_tilde = 15.0;
    return p;
}

/// Benchmark with fixed and proportional costs, used for the capped game.
inline BenchmarkParams capped_error_params() {
    BenchmarkParams p;
    p.sigma = 0.25;
    p.rho = 0.03;
    p.s1 = -kPi / 3.0;
    p.s2 = kPi / 3.0;
    p.c = 100.0;
    p.c_tilde = 30.0;
    p.lambda = 0.5;
    p.lambda_tilde = 0.3;
    return p;
}

inline ParabolicParams parabolic_params() {
    ParabolicParams p;
    p.base.sigma = 0.25;
    p.base.rho = 0.03;
    p.base.c = 100.0;
    p.base.c_tilde = 30.0;
    p.root_left = {-4.5, -kPi};
    p.root_right = {1.0, 2.7};
    return p;
}

struct BruteLoss {
    std::vector<double> values;
    std::vector<int> target;
};

/// O(n^2) scan of max_y v(y) + cost(x, y - x), first maximiser wins.
inline BruteLoss brute_loss(const std::vector<double>& xs, const std::vector<double>& v, const ImpulseTransfer& cost) {
    BruteLoss out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (std::size_t y = 0; y < xs.size(); ++y) {
            const double cand = v[y] + cost(xs[k], xs[y] - xs[k]);
            if (cand > best) {
                best = cand;
                arg = static_cast<int>(y);
            }
        }
        out.values.push_back(best);
        out.target.push_back(arg);
    }
    return out;
}

/// Node-wise projected Gauss-Seidel for max{L V + g, max_y B^y V - V} = 0,
/// with the obstacle recomputed by brute force at every node update.
inline std::vector<double> projected_gauss_seidel(const SubProblem& sp, double stationarity = 1e-12,
                                                  int max_sweeps = 2000000) {
    const std::size_t n = sp.size();
    std::vector<double> v(n, 0.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double off = sp.source[k];
            if (k > 0) off += sp.lower[k] * v[k - 1];
            if (k + 1 < n) off += sp.upper[k] * v[k + 1];
            const double pde = -off / sp.diag[k];
            double jump = sp.floor.empty() ? -std::numeric_limits<double>::infinity() : sp.floor[k];
            for (std::size_t y = 0; y < n; ++y) jump = std::max(jump, v[y] + sp.cost(sp.x[k], sp.x[y] - sp.x[k]));
            const double next = std::max(pde, jump);
            change = std::max(change, std::abs(next - v[k]));
            v[k] = next;
        }
        if (change <= stationarity) break;
    }
    return v;
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

/// Small single-player QVI with random bounded payoff and linear costs.
struct ToyProblem {
    Grid grid;
    SubProblem problem;
};

inline ToyProblem toy_problem(std::uint64_t seed, int steps = 10) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BenchmarkParams p = capped_error_params();
    p.sigma = 0.2 + 0.8 * u(rng);
    p.rho = 0.02 + 0.3 * u(rng);
    const GameSpec game = with_zero_slopes(build_benchmark(p));
    ToyProblem out{build_grid(-5.0, 5.0, steps), {}};
    const DiscreteGenerator a = build_generator(out.grid, game, Player::first);
    const Field payoff = random_field(rng, out.grid.size(), -5.0, 5.0);
    const auto cost = ImpulseTransfer::constant(-(1.0 + 4.0 * u(rng)), -u(rng));
    out.problem = restrict_subproblem(out.grid, a, p.rho, payoff, std::vector<bool>(out.grid.size(), true),
                                      Field(out.grid.size(), 0.0), cost);
    return out;
}

}  // namespace nzsig::testing
