#include "nzsig/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nzsig/errors.hpp"

namespace nzsig {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
    return out;
}

Field Grid::sample(const ScalarFn& fn) const {
    Field out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(node(k));
    return out;
}

Grid build_grid(double x_min, double x_max, int steps) {
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < 0.0 && 0.0 < x_max)) {
        throw ValidationError("grid bounds must satisfy x_min < 0 < x_max, got [" + std::to_string(x_min) + ", " +
                              std::to_string(x_max) + "]");
    }
    if (steps < 2) throw ValidationError("grid needs at least 2 steps, got " + std::to_string(steps));
    return Grid{x_min, x_max, steps, (x_max - x_min) / steps};
}

double interpolate(const Grid& grid, std::span<const double> v, double x) {
    if (v.size() != grid.size()) throw ValidationError("field size does not match grid");
    if (!(x > grid.x_min)) return v.front();
    if (!(x < grid.x_max)) return v.back();
    const double s = (x - grid.x_min) / grid.h;
    const auto k = std::min(static_cast<std::size_t>(s), grid.size() - 2);
    const double w = (x - grid.node(k)) / (grid.node(k + 1) - grid.node(k));
    return (1.0 - w) * v[k] + w * v[k + 1];
}

double DiscreteGenerator::entry(std::size_t row, std::size_t col) const {
    if (row == col) return diag[row];
    if (col + 1 == row) return lower[row];
    if (row + 1 == col) return upper[row];
    return 0.0;
}

Field DiscreteGenerator::apply(std::span<const double> v) const {
    const std::size_t n = size();
    Field out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = diag[k] * v[k];
        if (k > 0) acc += lower[k] * v[k - 1];
        if (k + 1 < n) acc += upper[k] * v[k + 1];
        out[k] = acc;
    }
    return out;
}

DiscreteGenerator build_generator(const Grid& grid, const GameSpec& game, Player player) {
    const std::size_t n = grid.size();
    const double h = grid.h;
    const NeumannSlopes slopes = game.player(player).slopes;

    DiscreteGenerator gen;
    gen.lower.assign(n, 0.0);
    gen.diag.assign(n, 0.0);
    gen.upper.assign(n, 0.0);
    gen.bc_correction.assign(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        const double x = grid.node(k);
        const double mu = game.drift(x);
        const double sigma = game.volatility(x);
        if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
            throw ValidationError("invalid drift/volatility at node " + std::to_string(k) + " (x = " +
                                  std::to_string(x) + ")");
        }
        if (sigma == 0.0 && mu == 0.0) {
            throw ValidationError("degenerate generator row at node " + std::to_string(k) + " (x = " +
                                  std::to_string(x) + "): sigma = mu = 0");
        }
        // Upwind first derivative, sgn(0) = +1.
        const double diffusion = 0.5 * sigma * sigma / (h * h);
        const double to_left = diffusion + (mu < 0.0 ? -mu / h : 0.0);
        const double to_right = diffusion + (mu >= 0.0 ? mu / h : 0.0);
        gen.diag[k] = -(to_left + to_right);

        if (k == 0) {
            // Ghost V[-1] = V[0] - h * left slope.
            gen.diag[k] += to_left;
            gen.bc_correction[k] -= to_left * h * slopes.left;
        } else {
            gen.lower[k] = to_left;
        }
        if (k + 1 == n) {
            // Ghost V[M+1] = V[M] + h * right slope.
            gen.diag[k] += to_right;
            gen.bc_correction[k] += to_right * h * slopes.right;
        } else {
            gen.upper[k] = to_right;
        }
    }
    return gen;
}

Field discrete_payoff(const Grid& grid, const GameSpec& game, Player player, const DiscreteGenerator& generator) {
    Field f = grid.sample(game.player(player).payoff);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += generator.bc_correction[k];
    return f;
}

MaxPlusResult max_plus_abs(std::span<const double> xs, std::span<const double> vs, std::span<const double> qs,
                           double slope) {
    const std::size_t ns = xs.size();
    const std::size_t nq = qs.size();
    MaxPlusResult out;
    out.values.assign(nq, kNegInf);
    out.arg.assign(nq, -1);
    if (ns == 0) return out;

    // Sources left of the query: vs - slope*xs, then + slope*q.
    std::vector<int> left(nq, -1);
    double best = kNegInf;
    int arg = -1;
    std::size_t s = 0;
    for (std::size_t p = 0; p < nq; ++p) {
        for (; s < ns && xs[s] <= qs[p]; ++s) {
            const double key = vs[s] - slope * xs[s];
            if (key > best) {
                best = key;
                arg = static_cast<int>(s);
            }
        }
        left[p] = arg;
    }
    // Sources right of the query, scanned from the right keeping the smallest index on ties.
    std::vector<int> right(nq, -1);
    best = kNegInf;
    arg = -1;
    s = ns;
    for (std::size_t p = nq; p-- > 0;) {
        for (; s > 0 && xs[s - 1] >= qs[p]; --s) {
            const double key = vs[s - 1] + slope * xs[s - 1];
            if (key >= best) {
                best = key;
                arg = static_cast<int>(s - 1);
            }
        }
        right[p] = arg;
    }

    for (std::size_t p = 0; p < nq; ++p) {
        const double q = qs[p];
        auto eval = [&](int a) {
            const auto u = static_cast<std::size_t>(a);
            return vs[u] + slope * std::abs(xs[u] - q);
        };
        const int l = left[p];
        const int r = right[p];
        if (l >= 0 && (r < 0 || eval(l) >= eval(r))) {
            out.values[p] = eval(l);
            out.arg[p] = l;
        } else {
            out.values[p] = eval(r);
            out.arg[p] = r;
        }
    }
    return out;
}

LossResult loss_operator(const Grid& grid, std::span<const double> v, const ImpulseTransfer& cost) {
    const std::size_t n = grid.size();
    if (v.size() != n) throw ValidationError("field size does not match grid");
    const std::vector<double> x = grid.nodes();
    const MaxPlusResult mp = max_plus_abs(x, v, x, cost.per_unit);

    LossResult out;
    out.values.resize(n);
    out.target = mp.arg;
    for (std::size_t k = 0; k < n; ++k) {
        const auto y = static_cast<std::size_t>(mp.arg[k]);
        out.values[k] = v[y] + (cost.level(x[k]) + cost.per_unit * std::abs(x[y] - x[k]));
    }
    return out;
}

LossResult loss_operator(const Grid& grid, std::span<const double> v, Player player, const GameSpec& game) {
    return loss_operator(grid, v, game.player(player).cost);
}

Field gain_operator(const Grid& grid, std::span<const double> v, const LossResult& opponent_loss, Player player,
                    const GameSpec& game) {
    const std::size_t n = grid.size();
    if (v.size() != n || opponent_loss.target.size() != n) {
        throw ValidationError("gain operator: field and opponent loss must live on the same grid");
    }
    const ImpulseTransfer& gain = game.player(player).gain;
    Field out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto t = static_cast<std::size_t>(opponent_loss.target[k]);
        const double xk = grid.node(k);
        out[k] = v[t] + gain(xk, grid.node(t) - xk);
    }
    return out;
}

Field SubProblem::apply_linear(std::span<const double> v) const {
    const std::size_t n = size();
    Field out(n);
    for (std::size_t p = 0; p < n; ++p) {
        double acc = diag[p] * v[p];
        if (p > 0) acc += lower[p] * v[p - 1];
        if (p + 1 < n) acc += upper[p] * v[p + 1];
        out[p] = acc;
    }
    return out;
}

Field SubProblem::obstacle(std::span<const double> v) const {
    const std::size_t n = size();
    const MaxPlusResult mp = max_plus_abs(x, v, x, cost.per_unit);
    Field out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto q = static_cast<std::size_t>(mp.arg[p]);
        const double jump = v[q] + (cost.level(x[p]) + cost.per_unit * std::abs(x[q] - x[p]));
        out[p] = std::max(floor[p], jump);
    }
    return out;
}

SubProblem restrict_subproblem(const Grid& grid, const DiscreteGenerator& generator, double rho,
                               std::span<const double> payoff, const std::vector<bool>& in_subgrid,
                               std::span<const double> exterior, const ImpulseTransfer& cost, ObstacleCap mode) {
    const std::size_t n = grid.size();
    if (payoff.size() != n || in_subgrid.size() != n || exterior.size() != n || generator.size() != n) {
        throw ValidationError("restrict_subproblem: inputs must live on the same grid");
    }

    SubProblem sp;
    sp.cost = cost;
    for (std::size_t k = 0; k < n; ++k) {
        if (in_subgrid[k]) sp.nodes.push_back(static_cast<int>(k));
    }
    if (sp.nodes.empty()) throw ValidationError("restrict_subproblem: empty subgrid");

    const std::size_t m = sp.nodes.size();
    sp.x.resize(m);
    sp.lower.assign(m, 0.0);
    sp.diag.assign(m, 0.0);
    sp.upper.assign(m, 0.0);
    sp.source.assign(m, 0.0);

    for (std::size_t p = 0; p < m; ++p) {
        const auto k = static_cast<std::size_t>(sp.nodes[p]);
        sp.x[p] = grid.node(k);
        sp.diag[p] = generator.diag[k] - rho;
        double g = payoff[k];
        if (k > 0) {
            if (in_subgrid[k - 1]) {
                sp.lower[p] = generator.lower[k];
            } else {
                g += generator.lower[k] * exterior[k - 1];
            }
        }
        if (k + 1 < n) {
            if (in_subgrid[k + 1]) {
                sp.upper[p] = generator.upper[k];
            } else {
                g += generator.upper[k] * exterior[k + 1];
            }
        }
        sp.source[p] = g;
    }

    sp.cap = kNegInf;
    for (std::size_t k = 0; k < n; ++k) {
        if (!in_subgrid[k]) sp.cap = std::max(sp.cap, exterior[k]);
    }

    if (mode == ObstacleCap::verbatim || m == n) {
        sp.floor.assign(m, sp.cap);
    } else {
        std::vector<double> ext_x, ext_v;
        for (std::size_t k = 0; k < n; ++k) {
            if (in_subgrid[k]) continue;
            ext_x.push_back(grid.node(k));
            ext_v.push_back(exterior[k]);
        }
        const MaxPlusResult mp = max_plus_abs(ext_x, ext_v, sp.x, cost.per_unit);
        sp.floor.resize(m);
        for (std::size_t p = 0; p < m; ++p) {
            const auto q = static_cast<std::size_t>(mp.arg[p]);
            sp.floor[p] = ext_v[q] + (cost.level(sp.x[p]) + cost.per_unit * std::abs(ext_x[q] - sp.x[p]));
        }
    }
    return sp;
}

}  // namespace nzsig
