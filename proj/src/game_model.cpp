#include "nzsig/game_model.hpp"

#include <algorithm>
#include <sstream>

#include "nzsig/errors.hpp"

namespace nzsig {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void validate_costs(const BenchmarkParams& p) {
    require(std::isfinite(p.sigma) && p.sigma > 0.0, "sigma must be positive, got " + fmt(p.sigma));
    require(std::isfinite(p.rho) && p.rho > 0.0, "rho must be positive, got " + fmt(p.rho));
    require(p.c_tilde >= 0.0, "violated 0 <= c_tilde (c_tilde = " + fmt(p.c_tilde) + ")");
    require(p.c_tilde <= p.c, "violated c_tilde <= c (c_tilde = " + fmt(p.c_tilde) + ", c = " + fmt(p.c) + ")");
    require(p.lambda_tilde >= 0.0, "violated 0 <= lambda_tilde (lambda_tilde = " + fmt(p.lambda_tilde) + ")");
    require(p.lambda_tilde <= p.lambda,
            "violated lambda_tilde <= lambda (lambda_tilde = " + fmt(p.lambda_tilde) + ", lambda = " + fmt(p.lambda) + ")");
    require(!(p.c == p.c_tilde && p.lambda == p.lambda_tilde), "violated (c, lambda) != (c_tilde, lambda_tilde)");
    require(1.0 - p.rho * p.lambda > 0.0, "violated 1 - rho*lambda > 0 (1 - rho*lambda = " + fmt(1.0 - p.rho * p.lambda) + ")");
}

GameSpec linear_cost_game(const BenchmarkParams& p, std::string family, ScalarFn f1, ScalarFn f2) {
    GameSpec g;
    g.family = std::move(family);
    g.drift = [](double) { return 0.0; };
    const double sigma = p.sigma;
    g.volatility = [sigma](double) { return sigma; };

    const auto cost = ImpulseTransfer::constant(-p.c, -p.lambda);
    const auto gain = ImpulseTransfer::constant(p.c_tilde, p.lambda_tilde);

    g.players[0] = {p.rho, std::move(f1), cost, gain, {p.lambda, p.lambda_tilde}};
    g.players[1] = {p.rho, std::move(f2), cost, gain, {-p.lambda_tilde, -p.lambda}};
    return g;
}

}  // namespace

void validate(const BenchmarkParams& params) {
    validate_costs(params);
    require(params.s1 < params.s2, "violated s1 < s2 (s1 = " + fmt(params.s1) + ", s2 = " + fmt(params.s2) + ")");
}

void validate(const ParabolicParams& params) {
    validate_costs(params.base);
    for (int i = 0; i < 2; ++i) {
        require(params.root_left[i] < params.root_right[i],
                "violated r_L < r_R for player " + std::to_string(i + 1));
    }
}

void validate(const CappedParams& params) {
    validate(params.base);
    require(std::isfinite(params.cap) && params.cap > 0.0, "cap K must be positive, got " + fmt(params.cap));
}

GameSpec build_benchmark(const BenchmarkParams& params) {
    validate(params);
    const double s1 = params.s1;
    const double s2 = params.s2;
    return linear_cost_game(
        params, "benchmark", [s1](double x) { return x - s1; }, [s2](double x) { return s2 - x; });
}

GameSpec build_parabolic(const ParabolicParams& params) {
    validate(params);
    auto parabola = [](double lo, double hi) { return [lo, hi](double x) { return -(x - lo) * (x - hi); }; };
    return linear_cost_game(params.base, "parabolic", parabola(params.root_left[0], params.root_right[0]),
                            parabola(params.root_left[1], params.root_right[1]));
}

GameSpec build_capped(const CappedParams& params) {
    validate(params);
    const double s1 = params.base.s1;
    const double s2 = params.base.s2;
    const double cap = params.cap;
    return linear_cost_game(
        params.base, "capped", [s1, cap](double x) { return std::min(x - s1, cap); },
        [s2, cap](double x) { return std::min(s2 - x, cap); });
}

GameSpec with_zero_slopes(GameSpec game) {
    for (auto& p : game.players) p.slopes = {};
    return game;
}

}  // namespace nzsig
