#pragma once

#include <array>

#include "nzsig/game_model.hpp"
#include "nzsig/grid.hpp"

namespace nzsig {

/// Constants of the closed-form equilibrium of the linear benchmark game.
///
/// Player 1 intervenes below x_bar[0] and moves the state to x_star[0];
/// player 2 intervenes above x_bar[1] and moves it to x_star[1].
struct BenchmarkClosedForm {
    BenchmarkParams params;
    double s_tilde = 0.0;
    double theta = 0.0;
    double eta = 0.0;
    double xi = 0.0;
    double gamma = 0.0;
    std::array<double, 2> a{};
    std::array<double, 2> x_bar{};
    std::array<double, 2> x_star{};

    /// A1 e^{theta x} + A2 e^{-theta x} + (s2 - x)/rho
    double phi(double x) const;
};

/// F(y) = 2y - eta log((eta + y)/(eta - y)) + theta c
double xi_equation(double y, double eta, double theta, double c);

/// Unique root of xi_equation in (0, eta), by bisection with a Newton polish.
/// |F| <= tol is required unless the sign change is already between adjacent doubles.
double solve_xi(double eta, double theta, double c, double tol = 1e-12);

BenchmarkClosedForm closed_form(const BenchmarkParams& params, double tol = 1e-12);

double exact_value(double x, Player player, const BenchmarkClosedForm& cf);

Field exact_field(const Grid& grid, Player player, const BenchmarkClosedForm& cf);

}  // namespace nzsig
