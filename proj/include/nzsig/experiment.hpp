#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nzsig/game_model.hpp"
#include "nzsig/grid.hpp"
#include "nzsig/initial_guess.hpp"
#include "nzsig/monte_carlo.hpp"
#include "nzsig/policy_iteration.hpp"

namespace nzsig {

enum class GameFamily { benchmark, parabolic, capped };
enum class GuessMode { zero, unilateral, staged_capped };

struct GameConfig {
    GameFamily family = GameFamily::benchmark;
    BenchmarkParams params;              // s1, s2 unused by the parabolic family
    std::array<double, 2> root_left{};   // parabolic only
    std::array<double, 2> root_right{};  // parabolic only
    double cap = 5.0;                    // capped only
};

struct GridConfig {
    double x_min = 0.0;
    double x_max = 0.0;
    std::vector<int> steps;
    bool default_domain = false;  // bounds were not given and a family default was used
};

struct GuessConfig {
    GuessMode mode = GuessMode::zero;
    double cap = 5.0;  // capped game used by the staged guess
    CappedGuess capped_start = CappedGuess::zero;
};

struct PerturbationConfig {
    double magnitude = 0.25;
    int draws = 20;
    PerturbMode mode = PerturbMode::target;
    std::vector<double> points;
};

struct MonteCarloConfig {
    SimConfig sim;
    std::vector<double> starts;
    std::optional<PerturbationConfig> perturbation;
};

struct ExperimentConfig {
    std::string name = "experiment";
    GameConfig game;
    GridConfig grid;
    SolverConfig solver;
    GuessConfig guess;
    bool compare_exact = false;
    std::optional<MonteCarloConfig> monte_carlo;
    std::filesystem::path output_dir = ".";
};

/// Default computational domain of a family.
std::array<double, 2> default_domain(GameFamily family);

const char* to_string(GameFamily family);
const char* to_string(GuessMode mode);

/// Parses the sectioned JSON schema documented in the README.  Unknown keys
/// and out-of-range values raise ValidationError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

GameSpec build_game(const GameConfig& config);

/// Sup-norm distance to the closed-form benchmark solution plus the error of
/// the extracted thresholds and targets.
struct ErrorReport {
    std::array<double, 2> sup_error{};
    double max_error = 0.0;
    double max_abs_exact = 0.0;
    std::array<double, 2> threshold_error{};
    std::array<double, 2> target_error{};
};

ErrorReport compare_to_exact(const SolveResult& result, const Grid& grid, const GameSpec& game,
                             const BenchmarkParams& params);

FieldPair initial_guess(const ExperimentConfig& config, const GameSpec& game, const Grid& grid,
                        std::vector<std::string>& notes);

struct MonteCarloRow {
    std::string kind;  // "equilibrium" or "deviation"
    int deviator = 0;  // 0 when nobody deviates
    int draw = 0;
    double x0 = 0.0;
    ObjectiveEstimate estimate;
    std::array<double, 2> value{};  // solver values at x0
};

struct RunRow {
    int steps = 0;
    SolveResult result;
    std::array<Strategy, 2> equilibrium;
    std::optional<ErrorReport> error;
    std::vector<MonteCarloRow> monte_carlo;
    std::vector<std::string> notes;
    std::vector<std::filesystem::path> files;
};

struct RunReport {
    std::vector<RunRow> rows;
    std::filesystem::path sweep_file;
};

/// Runs every grid size of the experiment and writes its artifacts.  Solver
/// non-convergence is reported in the rows, never thrown.
RunReport run(const ExperimentConfig& config, std::ostream* log = nullptr, int verbosity = 1);

/// Formats with 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double value);

}  // namespace nzsig
