#include "nzsig/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "nzsig/benchmark.hpp"
#include "nzsig/errors.hpp"

namespace nzsig {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Rejects keys outside `allowed` so that typos do not silently fall back to defaults.
void check_keys(const json& section, const std::string& where, const std::set<std::string>& allowed) {
    if (!section.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& item : section.items()) {
        if (!allowed.count(item.key())) throw ValidationError(where + ": unknown key \"" + item.key() + "\"");
    }
}

double number_at(const json& section, const std::string& where, const std::string& key, double fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

double required_number(const json& section, const std::string& where, const std::string& key) {
    if (!section.contains(key)) throw ValidationError(where + ": missing \"" + key + "\"");
    return number_at(section, where, key, 0.0);
}

int integer_at(const json& section, const std::string& where, const std::string& key, int fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string string_at(const json& section, const std::string& where, const std::string& key,
                      const std::string& fallback) {
    if (!section.contains(key)) return fallback;
    const json& v = section.at(key);
    if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers_at(const json& section, const std::string& where, const std::string& key) {
    std::vector<double> out;
    if (!section.contains(key)) return out;
    const json& v = section.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ValidationError(where + "." + key + ": expected a number or an array of numbers");
    for (const json& e : v) {
        if (!e.is_number()) throw ValidationError(where + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::array<double, 2> pair_at(const json& section, const std::string& where, const std::string& key) {
    const std::vector<double> v = numbers_at(section, where, key);
    if (v.size() != 2) throw ValidationError(where + "." + key + ": expected two numbers (player 1, player 2)");
    return {v[0], v[1]};
}

template <class Enum>
Enum choice(const std::string& where, const std::string& value,
            std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string known;
    for (const auto& [name, e] : options) {
        if (value == name) return e;
        known += known.empty() ? name : std::string(", ") + name;
    }
    throw ValidationError(where + ": unknown value \"" + value + "\" (expected one of " + known + ")");
}

GameConfig parse_game(const json& s) {
    const std::string w = "game";
    check_keys(s, w,
               {"family", "sigma", "rho", "s1", "s2", "c", "c_tilde", "lambda", "lambda_tilde", "root_left",
                "root_right", "cap"});
    GameConfig g;
    g.family = choice<GameFamily>(w + ".family", string_at(s, w, "family", ""),
                                  {{"benchmark", GameFamily::benchmark},
                                   {"parabolic", GameFamily::parabolic},
                                   {"capped", GameFamily::capped}});
    BenchmarkParams& p = g.params;
    p.sigma = required_number(s, w, "sigma");
    p.rho = required_number(s, w, "rho");
    p.c = required_number(s, w, "c");
    p.c_tilde = required_number(s, w, "c_tilde");
    p.lambda = number_at(s, w, "lambda", 0.0);
    p.lambda_tilde = number_at(s, w, "lambda_tilde", 0.0);
    if (g.family == GameFamily::parabolic) {
        if (s.contains("s1") || s.contains("s2")) throw ValidationError("game: s1/s2 do not apply to parabolic games");
        g.root_left = pair_at(s, w, "root_left");
        g.root_right = pair_at(s, w, "root_right");
    } else {
        if (s.contains("root_left") || s.contains("root_right")) {
            throw ValidationError("game: root_left/root_right apply to parabolic games only");
        }
        p.s1 = required_number(s, w, "s1");
        p.s2 = required_number(s, w, "s2");
    }
    if (s.contains("cap") && g.family != GameFamily::capped) throw ValidationError("game: cap applies to capped games only");
    g.cap = number_at(s, w, "cap", 5.0);
    return g;
}

GridConfig parse_grid(const json& s, GameFamily family) {
    const std::string w = "grid";
    check_keys(s, w, {"x_min", "x_max", "M"});
    GridConfig g;
    const bool has_min = s.contains("x_min");
    const bool has_max = s.contains("x_max");
    if (has_min != has_max) throw ValidationError("grid: give both x_min and x_max or neither");
    const auto fallback = default_domain(family);
    g.default_domain = !has_min;
    g.x_min = number_at(s, w, "x_min", fallback[0]);
    g.x_max = number_at(s, w, "x_max", fallback[1]);
    if (!s.contains("M")) throw ValidationError("grid: missing \"M\"");
    const json& m = s.at("M");
    auto take = [&](const json& e) {
        if (!e.is_number_integer()) throw ValidationError("grid.M: expected integers");
        g.steps.push_back(e.get<int>());
    };
    if (m.is_array()) {
        for (const json& e : m) take(e);
    } else {
        take(m);
    }
    return g;
}

SolverConfig parse_solver(const json& s) {
    const std::string w = "solver";
    check_keys(s, w, {"eps", "alpha", "r0", "k_max", "inner_tol", "inner_k_max", "order", "residual", "obstacle"});
    SolverConfig c;
    c.eps = number_at(s, w, "eps", c.eps);
    c.alpha = number_at(s, w, "alpha", c.alpha);
    c.r0 = number_at(s, w, "r0", c.r0);
    c.k_max = integer_at(s, w, "k_max", c.k_max);
    c.inner.tol = number_at(s, w, "inner_tol", c.inner.tol);
    c.inner.k_max = integer_at(s, w, "inner_k_max", c.inner.k_max);
    c.order = choice<UpdateOrder>(w + ".order", string_at(s, w, "order", "jacobi"),
                                  {{"jacobi", UpdateOrder::jacobi}, {"gauss_seidel", UpdateOrder::gauss_seidel}});
    c.residual = choice<ResidualPlacement>(
        w + ".residual", string_at(s, w, "residual", "system"),
        {{"system", ResidualPlacement::system}, {"verbatim", ResidualPlacement::verbatim}});
    c.cap = choice<ObstacleCap>(w + ".obstacle", string_at(s, w, "obstacle", "with_cost"),
                                {{"with_cost", ObstacleCap::with_cost}, {"verbatim", ObstacleCap::verbatim}});
    return c;
}

GuessConfig parse_guess(const json& s) {
    const std::string w = "guess";
    check_keys(s, w, {"mode", "cap", "capped_start"});
    GuessConfig g;
    g.mode = choice<GuessMode>(w + ".mode", string_at(s, w, "mode", "zero"),
                               {{"zero", GuessMode::zero},
                                {"unilateral", GuessMode::unilateral},
                                {"staged_capped", GuessMode::staged_capped}});
    g.cap = number_at(s, w, "cap", g.cap);
    g.capped_start = choice<CappedGuess>(w + ".capped_start", string_at(s, w, "capped_start", "zero"),
                                         {{"zero", CappedGuess::zero}, {"unilateral", CappedGuess::unilateral}});
    return g;
}

MonteCarloConfig parse_monte_carlo(const json& s) {
    const std::string w = "monte_carlo";
    check_keys(s, w, {"T", "dt", "N", "seed", "x0", "max_interventions", "perturbation"});
    MonteCarloConfig m;
    m.sim.horizon = number_at(s, w, "T", m.sim.horizon);
    m.sim.dt = number_at(s, w, "dt", m.sim.dt);
    m.sim.paths = integer_at(s, w, "N", m.sim.paths);
    if (s.contains("seed")) {
        const json& seed = s.at("seed");
        const bool ok = seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0);
        if (!ok) throw ValidationError("monte_carlo.seed: expected a non-negative integer");
        m.sim.seed = seed.get<std::uint64_t>();
    }
    m.sim.max_interventions_per_instant = integer_at(s, w, "max_interventions", m.sim.max_interventions_per_instant);
    m.starts = numbers_at(s, w, "x0");
    if (m.starts.empty()) m.starts.push_back(0.0);
    if (s.contains("perturbation")) {
        const json& p = s.at("perturbation");
        const std::string pw = w + ".perturbation";
        check_keys(p, pw, {"magnitude", "draws", "mode", "x"});
        PerturbationConfig pc;
        pc.magnitude = number_at(p, pw, "magnitude", pc.magnitude);
        pc.draws = integer_at(p, pw, "draws", pc.draws);
        pc.mode = choice<PerturbMode>(pw + ".mode", string_at(p, pw, "mode", "target"),
                                      {{"target", PerturbMode::target}, {"delta", PerturbMode::delta}});
        pc.points = numbers_at(p, pw, "x");
        if (pc.points.empty()) pc.points = m.starts;
        m.perturbation = pc;
    }
    return m;
}

std::string csv_line(std::initializer_list<double> values) {
    std::string line;
    for (double v : values) {
        if (!line.empty()) line += ',';
        line += format_number(v);
    }
    return line + '\n';
}

/// Finite endpoint of the single continuation interval, NaN when the
/// strategy is not of threshold type.
double threshold_of(const Strategy& s) {
    if (s.continuation.size() != 1) return kNaN;
    const Interval& c = s.continuation.front();
    if (std::isfinite(c.lo) == std::isfinite(c.hi)) return kNaN;
    return std::isfinite(c.lo) ? c.lo : c.hi;
}

double target_of(const Strategy& s) { return s.impulses.size() == 1 ? s.impulses.front().target : kNaN; }

std::string describe(const Strategy& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < s.continuation.size(); ++k) {
        if (k) os << ", ";
        os << '(' << format_number(s.continuation[k].lo) << ", " << format_number(s.continuation[k].hi) << ')';
    }
    os << ']';
    return os.str();
}

std::string describe_targets(const Strategy& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < s.impulses.size(); ++k) {
        if (k) os << ", ";
        os << '[' << format_number(s.impulses[k].lo) << ", " << format_number(s.impulses[k].hi) << "] -> "
           << format_number(s.impulses[k].target);
    }
    os << ']';
    return os.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

std::vector<MonteCarloRow> run_monte_carlo(const MonteCarloConfig& mc, const GameSpec& game, const Grid& grid,
                                           const FieldPair& v, const std::array<Strategy, 2>& equilibrium) {
    std::vector<MonteCarloRow> rows;
    auto values_at = [&](double x) {
        return std::array<double, 2>{interpolate(grid, v[0], x), interpolate(grid, v[1], x)};
    };
    for (double x0 : mc.starts) {
        SimConfig sim = mc.sim;
        sim.x0 = x0;
        rows.push_back({"equilibrium", 0, 0, x0, estimate_objective(game, equilibrium, sim), values_at(x0)});
    }
    if (!mc.perturbation) return rows;
    const PerturbationConfig& pc = *mc.perturbation;
    for (Player deviator : {Player::first, Player::second}) {
        for (double x0 : pc.points) {
            for (int draw = 0; draw < pc.draws; ++draw) {
                const std::uint64_t seed = mc.sim.seed * 1000003u + static_cast<std::uint64_t>(draw) * 2u +
                                           static_cast<std::uint64_t>(index(deviator));
                StrategyPair pair = equilibrium;
                pair[index(deviator)] = perturb_strategy(equilibrium[index(deviator)], pc.magnitude, seed, pc.mode);
                SimConfig sim = mc.sim;
                sim.x0 = x0;
                rows.push_back(
                    {"deviation", number(deviator), draw + 1, x0, estimate_objective(game, pair, sim), values_at(x0)});
            }
        }
    }
    return rows;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::array<double, 2> default_domain(GameFamily family) {
    return family == GameFamily::parabolic ? std::array<double, 2>{-8.0, 6.0} : std::array<double, 2>{-10.0, 10.0};
}

const char* to_string(GameFamily family) {
    switch (family) {
        case GameFamily::benchmark: return "benchmark";
        case GameFamily::parabolic: return "parabolic";
        case GameFamily::capped: return "capped";
    }
    return "?";
}

const char* to_string(GuessMode mode) {
    switch (mode) {
        case GuessMode::zero: return "zero";
        case GuessMode::unilateral: return "unilateral";
        case GuessMode::staged_capped: return "staged_capped";
    }
    return "?";
}

ExperimentConfig parse_config(const json& doc) {
    if (doc.is_null() || (doc.is_object() && doc.empty())) throw ValidationError("empty configuration");
    check_keys(doc, "config", {"name", "game", "grid", "solver", "guess", "compare_exact", "monte_carlo", "output"});
    ExperimentConfig c;
    c.name = string_at(doc, "config", "name", c.name);
    if (!doc.contains("game")) throw ValidationError("config: missing \"game\" section");
    if (!doc.contains("grid")) throw ValidationError("config: missing \"grid\" section");
    c.game = parse_game(doc.at("game"));
    c.grid = parse_grid(doc.at("grid"), c.game.family);
    if (doc.contains("solver")) c.solver = parse_solver(doc.at("solver"));
    if (doc.contains("guess")) c.guess = parse_guess(doc.at("guess"));
    if (doc.contains("compare_exact")) {
        if (!doc.at("compare_exact").is_boolean()) throw ValidationError("config.compare_exact: expected true/false");
        c.compare_exact = doc.at("compare_exact").get<bool>();
    }
    if (doc.contains("monte_carlo")) c.monte_carlo = parse_monte_carlo(doc.at("monte_carlo"));
    if (doc.contains("output")) {
        check_keys(doc.at("output"), "output", {"directory"});
        c.output_dir = string_at(doc.at("output"), "output", "directory", ".");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open configuration " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("empty configuration");
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

void validate(const ExperimentConfig& c) {
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
        throw ValidationError("name must be non-empty and contain no path separators");
    }
    build_game(c.game);
    if (c.grid.steps.empty()) throw ValidationError("grid.M: at least one grid size is required");
    for (int m : c.grid.steps) build_grid(c.grid.x_min, c.grid.x_max, m);
    validate(c.solver);
    if (c.guess.mode == GuessMode::staged_capped) {
        if (c.game.family != GameFamily::benchmark) {
            throw ValidationError("guess.mode staged_capped applies to the benchmark family only");
        }
        validate(CappedParams{c.game.params, c.guess.cap});
    }
    if (c.compare_exact && c.game.family == GameFamily::parabolic) {
        throw ValidationError("compare_exact requires the benchmark or capped family");
    }
    if (c.monte_carlo) {
        validate(c.monte_carlo->sim);
        if (const auto& p = c.monte_carlo->perturbation) {
            if (!(p->magnitude >= 0.0 && p->magnitude < 1.0)) {
                throw ValidationError("monte_carlo.perturbation.magnitude must lie in [0, 1)");
            }
            if (p->draws < 1) throw ValidationError("monte_carlo.perturbation.draws must be >= 1");
        }
    }
}

GameSpec build_game(const GameConfig& config) {
    switch (config.family) {
        case GameFamily::benchmark: return build_benchmark(config.params);
        case GameFamily::parabolic: return build_parabolic({config.params, config.root_left, config.root_right});
        case GameFamily::capped: return build_capped({config.params, config.cap});
    }
    throw ValidationError("unknown game family");
}

ErrorReport compare_to_exact(const SolveResult& result, const Grid& grid, const GameSpec& game,
                             const BenchmarkParams& params) {
    if (game.family != "benchmark") {
        throw ValidationError("compare_to_exact: closed form available for the benchmark family only, got " +
                              game.family);
    }
    const BenchmarkClosedForm cf = closed_form(params);
    ErrorReport report;
    for (Player p : {Player::first, Player::second}) {
        const int i = index(p);
        const Field exact = exact_field(grid, p, cf);
        if (result.v[i].size() != exact.size()) throw ValidationError("compare_to_exact: field does not match grid");
        for (std::size_t k = 0; k < exact.size(); ++k) {
            report.sup_error[i] = std::max(report.sup_error[i], std::abs(result.v[i][k] - exact[k]));
            report.max_abs_exact = std::max(report.max_abs_exact, std::abs(exact[k]));
        }
    }
    report.max_error = std::max(report.sup_error[0], report.sup_error[1]);
    const auto eq = extract_equilibrium(result.v, grid, game, 1e-8);
    for (int i = 0; i < 2; ++i) {
        report.threshold_error[i] = std::abs(threshold_of(eq[i]) - cf.x_bar[i]);
        report.target_error[i] = std::abs(target_of(eq[i]) - cf.x_star[i]);
    }
    return report;
}

FieldPair initial_guess(const ExperimentConfig& config, const GameSpec& game, const Grid& grid,
                        std::vector<std::string>& notes) {
    switch (config.guess.mode) {
        case GuessMode::zero: return {Field(grid.size(), 0.0), Field(grid.size(), 0.0)};
        case GuessMode::unilateral: {
            FieldPair out;
            for (Player p : {Player::first, Player::second}) {
                UnilateralResult u = unilateral_value(game, p, grid, config.solver.inner);
                for (auto& w : u.warnings) notes.push_back(std::move(w));
                out[index(p)] = std::move(u.v);
            }
            return out;
        }
        case GuessMode::staged_capped: {
            StagedGuess staged =
                staged_benchmark_guess(config.game.params, config.guess.cap, grid, config.solver, config.guess.capped_start);
            std::ostringstream os;
            os << "capped stage: " << to_string(staged.capped.status) << " after " << staged.capped.iterations
               << " iterations, R = " << format_number(staged.capped.breakdown.max);
            notes.push_back(os.str());
            return std::move(staged.v);
        }
    }
    throw ValidationError("unknown guess mode");
}

RunReport run(const ExperimentConfig& config, std::ostream* log, int verbosity) {
    validate(config);
    const GameSpec game = build_game(config.game);
    std::filesystem::create_directories(config.output_dir);

    RunReport report;
    for (int steps : config.grid.steps) {
        const Grid grid = build_grid(config.grid.x_min, config.grid.x_max, steps);
        RunRow row;
        row.steps = steps;
        const FieldPair v0 = initial_guess(config, game, grid, row.notes);
        row.result = solve_system(game, grid, v0, config.solver);
        row.equilibrium = extract_equilibrium(row.result.v, grid, game, config.solver.eps);
        if (config.compare_exact) {
            // A capped game is compared with the benchmark it truncates.
            row.error = compare_to_exact(row.result, grid, build_benchmark(config.game.params), config.game.params);
        }

        const std::string stem = config.name + "_M" + std::to_string(steps);

        // Value table.
        const std::filesystem::path values_path = config.output_dir / (stem + "_values.csv");
        {
            std::ofstream out = open_output(values_path);
            std::array<Field, 2> exact;
            if (config.compare_exact) {
                const BenchmarkClosedForm cf = closed_form(config.game.params);
                exact = {exact_field(grid, Player::first, cf), exact_field(grid, Player::second, cf)};
                out << "x,V1,V2,exact_V1,exact_V2,error_V1,error_V2\n";
            } else {
                out << "x,V1,V2\n";
            }
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double v1 = row.result.v[0][k];
                const double v2 = row.result.v[1][k];
                if (config.compare_exact) {
                    out << csv_line({grid.node(k), v1, v2, exact[0][k], exact[1][k], std::abs(v1 - exact[0][k]),
                                     std::abs(v2 - exact[1][k])});
                } else {
                    out << csv_line({grid.node(k), v1, v2});
                }
            }
        }
        row.files.push_back(values_path);

        // Residual and relaxation history; R^0 is +inf by convention.
        const std::filesystem::path history_path = config.output_dir / (stem + "_history.csv");
        {
            std::ofstream out = open_output(history_path);
            out << "k,R,r\n";
            const auto& r = row.result.relaxation_history;
            const auto& res = row.result.residual_history;
            for (std::size_t k = 0; k < r.size(); ++k) {
                const double rk = k == 0 ? std::numeric_limits<double>::infinity() : res[k - 1];
                out << k << ',' << format_number(rk) << ',' << format_number(r[k]) << '\n';
            }
        }
        row.files.push_back(history_path);

        if (config.monte_carlo) {
            row.monte_carlo = run_monte_carlo(*config.monte_carlo, game, grid, row.result.v, row.equilibrium);
            const std::filesystem::path mc_path = config.output_dir / (stem + "_montecarlo.csv");
            std::ofstream out = open_output(mc_path);
            out << "kind,deviator,draw,x0,J1,stderr1,J2,stderr2,V1,V2\n";
            for (const MonteCarloRow& m : row.monte_carlo) {
                out << m.kind << ',' << m.deviator << ',' << m.draw << ','
                    << csv_line({m.x0, m.estimate.player[0].mean, m.estimate.player[0].std_error,
                                 m.estimate.player[1].mean, m.estimate.player[1].std_error, m.value[0], m.value[1]});
            }
            row.files.push_back(mc_path);
        }

        // Summary.
        const std::filesystem::path summary_path = config.output_dir / (stem + "_summary.txt");
        {
            std::ofstream out = open_output(summary_path);
            const SolveResult& r = row.result;
            out << "name = " << config.name << '\n'
                << "family = " << to_string(config.game.family) << '\n'
                << "M = " << steps << '\n'
                << "x_min = " << format_number(grid.x_min) << '\n'
                << "x_max = " << format_number(grid.x_max) << '\n'
                << "domain = " << (config.grid.default_domain ? "assumed (family default)" : "configured") << '\n'
                << "guess = " << to_string(config.guess.mode) << '\n'
                << "status = " << to_string(r.status) << '\n'
                << "converged = " << (r.converged ? "true" : "false") << '\n'
                << "iterations = " << r.iterations << '\n'
                << "R_inf = " << format_number(r.breakdown.max) << '\n'
                << "worst_player = " << number(r.breakdown.worst_player) << '\n'
                << "worst_node = " << r.breakdown.worst_node << '\n'
                << "worst_x = " << format_number(grid.node(static_cast<std::size_t>(r.breakdown.worst_node))) << '\n'
                << "worst_kind = "
                << to_string(r.breakdown.kind[index(r.breakdown.worst_player)]
                                             [static_cast<std::size_t>(r.breakdown.worst_node)])
                << '\n'
                << "inner_iterations = " << r.inner_iterations << '\n'
                << "inner_all_converged = " << (r.inner_all_converged ? "true" : "false") << '\n';
            for (int i = 0; i < 2; ++i) {
                out << "player" << i + 1 << ".continuation = " << describe(row.equilibrium[i]) << '\n'
                    << "player" << i + 1 << ".impulses = " << describe_targets(row.equilibrium[i]) << '\n';
            }
            if (row.error) {
                const ErrorReport& e = *row.error;
                out << "sup_error = " << format_number(e.max_error) << '\n'
                    << "sup_error_V1 = " << format_number(e.sup_error[0]) << '\n'
                    << "sup_error_V2 = " << format_number(e.sup_error[1]) << '\n'
                    << "relative_error = " << format_number(e.max_error / e.max_abs_exact) << '\n'
                    << "threshold_error = " << format_number(e.threshold_error[0]) << ", "
                    << format_number(e.threshold_error[1]) << '\n'
                    << "target_error = " << format_number(e.target_error[0]) << ", "
                    << format_number(e.target_error[1]) << '\n';
            }
            if (!r.message.empty()) out << "message = " << r.message << '\n';
            for (const std::string& note : row.notes) out << "note = " << note << '\n';
        }
        row.files.push_back(summary_path);

        if (log && verbosity > 0) {
            *log << config.name << " M=" << steps << ": " << to_string(row.result.status) << ", "
                 << row.result.iterations << " iterations, R = " << format_number(row.result.breakdown.max);
            if (row.error) *log << ", sup error = " << format_number(row.error->max_error);
            *log << '\n';
            if (verbosity > 1) {
                for (const std::string& note : row.notes) *log << "  " << note << '\n';
                for (std::size_t k = 0; k < row.result.residual_history.size(); ++k) {
                    *log << "  k=" << k + 1 << " R=" << format_number(row.result.residual_history[k])
                         << " r=" << format_number(row.result.relaxation_history[k + 1]) << '\n';
                }
            }
        }
        report.rows.push_back(std::move(row));
    }

    report.sweep_file = config.output_dir / (config.name + "_sweep.csv");
    std::ofstream out = open_output(report.sweep_file);
    out << "M,status,converged,iterations,R_inf" << (config.compare_exact ? ",sup_error" : "") << '\n';
    for (const RunRow& row : report.rows) {
        out << row.steps << ',' << to_string(row.result.status) << ',' << (row.result.converged ? 1 : 0) << ','
            << row.result.iterations << ',' << format_number(row.result.breakdown.max);
        if (row.error) out << ',' << format_number(row.error->max_error);
        out << '\n';
    }
    return report;
}

}  // namespace nzsig
