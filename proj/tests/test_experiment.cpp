#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "nzsig/benchmark.hpp"
#include "nzsig/errors.hpp"
#include "nzsig/experiment.hpp"
#include "support.hpp"

using namespace nzsig;
using nlohmann::json;
namespace fs = std::filesystem;
namespace t = nzsig::testing;

namespace {

json small_parabolic() {
    return json::parse(R"({
      "name": "small",
      "game": {"family": "parabolic", "sigma": 0.25, "rho": 0.03, "c": 100, "c_tilde": 30,
               "root_left": [-4.5, -3.141592653589793], "root_right": [1, 2.7]},
      "grid": {"x_min": -6, "x_max": 6, "M": [60, 80]},
      "solver": {"k_max": 200}
    })");
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nzsig_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NZSIG_RUN_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::stod(format_number(t::kPi)) == t::kPi);
}

TEST_CASE("configuration parsing") {
    const ExperimentConfig c = parse_config(small_parabolic());
    CHECK(c.name == "small");
    CHECK(c.game.family == GameFamily::parabolic);
    CHECK(c.game.root_right[1] == 2.7);
    CHECK(c.grid.steps == std::vector<int>{60, 80});
    CHECK_FALSE(c.grid.default_domain);
    CHECK(c.solver.k_max == 200);
    CHECK(c.solver.alpha == 0.8);
    CHECK(c.guess.mode == GuessMode::zero);
    CHECK_FALSE(c.monte_carlo.has_value());

    json d = small_parabolic();
    d["grid"].erase("x_min");
    d["grid"].erase("x_max");
    const ExperimentConfig fallback = parse_config(d);
    CHECK(fallback.grid.default_domain);
    CHECK(fallback.grid.x_min == -8.0);
    CHECK(fallback.grid.x_max == 6.0);

    for (const char* file : {"benchmark_sweep", "capped_sweep", "parabolic", "parabolic_nash", "parabolic_monte_carlo",
                             "parabolic_sweep", "benchmark_right"}) {
        CAPTURE(file);
        CHECK_NOTHROW(load_config(fs::path(NZSIG_CONFIG_DIR) / (std::string(file) + ".json")));
    }
}

TEST_CASE("configuration errors") {
    auto rejects = [](json d, const std::string& fragment) {
        CAPTURE(fragment);
        CHECK_THROWS_WITH_AS(parse_config(d), doctest::Contains(fragment.c_str()), ValidationError);
    };
    json d = small_parabolic();
    d["solver"]["tolerance"] = 1;
    rejects(d, "unknown key \"tolerance\"");
    d = small_parabolic();
    d["extra"] = true;
    rejects(d, "unknown key \"extra\"");
    d = small_parabolic();
    d["game"]["s1"] = 1;
    rejects(d, "s1/s2 do not apply");
    d = small_parabolic();
    d["game"]["family"] = "quadratic";
    rejects(d, "unknown value \"quadratic\"");
    d = small_parabolic();
    d["grid"]["M"] = 2.5;
    rejects(d, "grid.M");
    d = small_parabolic();
    d["grid"].erase("x_max");
    rejects(d, "both x_min and x_max");
    d = small_parabolic();
    d["compare_exact"] = true;
    rejects(d, "compare_exact");
    d = small_parabolic();
    d["guess"] = {{"mode", "staged_capped"}};
    rejects(d, "staged_capped");
    d = small_parabolic();
    d["solver"]["alpha"] = 1.5;
    rejects(d, "alpha");
    d = small_parabolic();
    d["monte_carlo"] = {{"N", 0}};
    rejects(d, "N");
    d = small_parabolic();
    d["monte_carlo"] = {{"perturbation", {{"magnitude", 1.0}}}};
    rejects(d, "magnitude");
    d = small_parabolic();
    d["name"] = "a/b";
    rejects(d, "name");
    d = small_parabolic();
    d["game"]["sigma"] = -1.0;
    rejects(d, "sigma");
    rejects(json::object(), "empty configuration");

    const fs::path dir = scratch("config_errors");
    fs::create_directories(dir);
    std::ofstream(dir / "blank.json") << "  \n";
    std::ofstream(dir / "broken.json") << "{\"name\": ";
    CHECK_THROWS_WITH_AS(load_config(dir / "blank.json"), "empty configuration", ValidationError);
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ValidationError);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ValidationError);
}

TEST_CASE("comparison with the closed form") {
    const BenchmarkParams p = t::linear_params();
    const Grid g = build_grid(-10.0, 10.0, 200);
    const BenchmarkClosedForm cf = closed_form(p);
    SolveResult exact;
    exact.v = {exact_field(g, Player::first, cf), exact_field(g, Player::second, cf)};
    const ErrorReport e = compare_to_exact(exact, g, build_benchmark(p), p);
    CHECK(e.max_error == 0.0);
    CHECK(e.max_abs_exact > 0.0);

    const GameSpec parabolic = build_parabolic(t::parabolic_params());
    CHECK_THROWS_WITH_AS(compare_to_exact(exact, g, parabolic, p), doctest::Contains("benchmark family only"),
                         ValidationError);
}

TEST_CASE("runs write consistent, reproducible artifacts") {
    ExperimentConfig c = parse_config(small_parabolic());
    c.output_dir = scratch("run_a");
    std::ostringstream log;
    const RunReport a = run(c, &log, 1);
    REQUIRE(a.rows.size() == 2);
    CHECK(log.str().find("small M=60") != std::string::npos);

    // Sweep rows mirror the in-memory report.
    std::istringstream sweep(slurp(a.sweep_file));
    std::string line;
    std::getline(sweep, line);
    CHECK(line == "M,status,converged,iterations,R_inf");
    for (const RunRow& row : a.rows) {
        REQUIRE(std::getline(sweep, line));
        std::ostringstream expected;
        expected << row.steps << ',' << to_string(row.result.status) << ',' << (row.result.converged ? 1 : 0) << ','
                 << row.result.iterations << ',' << format_number(row.result.breakdown.max);
        CHECK(line == expected.str());
    }

    // Value table has one line per node and parses back to the solution.
    const RunRow& first = a.rows[0];
    std::istringstream values(slurp(first.files[0]));
    std::getline(values, line);
    CHECK(line == "x,V1,V2");
    std::size_t k = 0;
    while (std::getline(values, line)) {
        std::istringstream fields(line);
        std::string x, v1, v2;
        std::getline(fields, x, ',');
        std::getline(fields, v1, ',');
        std::getline(fields, v2, ',');
        REQUIRE(k < first.result.v[0].size());
        CHECK(std::stod(v1) == first.result.v[0][k]);
        CHECK(std::stod(v2) == first.result.v[1][k]);
        ++k;
    }
    CHECK(k == 61);

    // History starts with R^0 = inf and carries one row per relaxation level.
    std::istringstream history(slurp(first.files[1]));
    std::getline(history, line);
    CHECK(line == "k,R,r");
    std::getline(history, line);
    CHECK(line == "0,inf,1");
    std::size_t rows = 1;
    while (std::getline(history, line)) ++rows;
    CHECK(rows == first.result.relaxation_history.size());

    const std::string summary = slurp(first.files.back());
    CHECK(summary.find("family = parabolic") != std::string::npos);
    CHECK(summary.find("domain = configured") != std::string::npos);

    // Same configuration, fresh directory: byte-identical outputs.
    c.output_dir = scratch("run_b");
    const RunReport b = run(c, nullptr, 0);
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        for (std::size_t f = 0; f < a.rows[r].files.size(); ++f) {
            CHECK(slurp(a.rows[r].files[f]) == slurp(b.rows[r].files[f]));
        }
    }
    CHECK(slurp(a.sweep_file) == slurp(b.sweep_file));
}

TEST_CASE("monte carlo rows are written") {
    json d = small_parabolic();
    d["grid"]["M"] = 60;
    d["monte_carlo"] = {{"T", 5}, {"dt", 0.01}, {"N", 4}, {"seed", 3}, {"x0", {0, -1}},
                        {"perturbation", {{"magnitude", 0.2}, {"draws", 2}, {"x", {0}}}}};
    ExperimentConfig c = parse_config(d);
    c.output_dir = scratch("mc");
    const RunReport r = run(c, nullptr, 0);
    const auto& mc = r.rows[0].monte_carlo;
    // 2 equilibrium starts + 2 deviators x 1 point x 2 draws.
    REQUIRE(mc.size() == 6);
    CHECK(mc[0].kind == "equilibrium");
    CHECK(mc[1].x0 == -1.0);
    CHECK(mc[2].kind == "deviation");
    CHECK(mc[2].deviator == 1);
    CHECK(mc[5].deviator == 2);
    CHECK(mc[5].draw == 2);
    std::istringstream file(slurp(r.rows[0].files[2]));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(file, line)) ++lines;
    CHECK(lines == 7);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    {
        json d = small_parabolic();
        d["grid"]["M"] = 40;
        d["output"] = {{"directory", (dir / "out").string()}};
        std::ofstream(dir / "ok.json") << d.dump();
        d["solver"]["k_max"] = 1;
        std::ofstream(dir / "budget.json") << d.dump();
        d["game"]["rho"] = -1;
        std::ofstream(dir / "bad.json") << d.dump();
        std::ofstream(dir / "empty.json") << "";
    }
    CHECK(run_cli((dir / "ok.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "small_sweep.csv"));
    CHECK(run_cli((dir / "ok.json").string() + " -o " + (dir / "elsewhere").string() + " -v 0") == 0);
    CHECK(fs::exists(dir / "elsewhere" / "small_M40_summary.txt"));
    // Non-convergence is reported in the outputs, not through the exit code.
    CHECK(run_cli((dir / "budget.json").string()) == 0);
    CHECK(run_cli((dir / "bad.json").string()) == 1);
    CHECK(run_cli((dir / "empty.json").string()) == 1);
    CHECK(run_cli((dir / "missing.json").string()) == 1);
    CHECK(run_cli((dir / "ok.json").string() + " --seed 4") == 1);
    CHECK(run_cli((dir / "ok.json").string() + " -v 7") == 1);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("--help") == 0);
}

}
