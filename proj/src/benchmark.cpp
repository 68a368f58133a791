#include "nzsig/benchmark.hpp"

#include <cmath>
#include <sstream>

#include "nzsig/errors.hpp"

namespace nzsig {

double BenchmarkClosedForm::phi(double x) const {
    return a[0] * std::exp(theta * x) + a[1] * std::exp(-theta * x) + (params.s2 - x) / params.rho;
}

double xi_equation(double y, double eta, double theta, double c) {
    return 2.0 * y - eta * std::log((eta + y) / (eta - y)) + theta * c;
}

double solve_xi(double eta, double theta, double c, double tol) {
    if (!(eta > 0.0) || !(theta > 0.0) || !(tol > 0.0)) {
        throw ValidationError("solve_xi: requires eta > 0, theta > 0, tol > 0");
    }
    if (!(c > 0.0)) throw ValidationError("solve_xi: c must be positive (c = 0 puts the root on the boundary)");

    auto F = [&](double y) { return xi_equation(y, eta, theta, c); };
    double lo = 0.0;
    double hi = eta;
    // F(0) = theta c > 0 and F -> -inf at eta; F is strictly decreasing.
    if (!(F(lo) > 0.0)) throw SolverError("solve_xi: F(0) is not positive");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = F(mid);
        if (std::abs(fm) <= tol * 1e-2) break;
        if (fm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish inside the bracket.
    double y = mid;
    for (int it = 0; it < 5; ++it) {
        const double fy = F(y);
        const double dfy = 2.0 - 2.0 * eta * eta / (eta * eta - y * y);
        const double next = y - fy / dfy;
        if (!(next > lo && next < hi) || !std::isfinite(next)) break;
        if (std::abs(F(next)) > std::abs(fy)) break;
        y = next;
    }
    // Also accept a root bracketed by adjacent doubles.
    const bool resolved = F(std::nextafter(y, 0.0)) >= 0.0 && F(std::nextafter(y, eta)) <= 0.0;
    if (!(std::abs(F(y)) <= tol) && !resolved) {
        std::ostringstream os;
        os.precision(17);
        os << "solve_xi: |F(xi)| = " << std::abs(F(y)) << " exceeds tolerance " << tol;
        throw SolverError(os.str());
    }
    return y;
}

BenchmarkClosedForm closed_form(const BenchmarkParams& p, double tol) {
    validate(p);
    BenchmarkClosedForm cf;
    cf.params = p;
    cf.s_tilde = 0.5 * (p.s1 + p.s2);
    cf.theta = std::sqrt(2.0 * p.rho / (p.sigma * p.sigma));
    cf.eta = (1.0 - p.lambda * p.rho) / p.rho;
    cf.xi = solve_xi(cf.eta, cf.theta, p.c, tol);

    const double theta = cf.theta;
    const double eta = cf.eta;
    const double xi = cf.xi;
    cf.gamma = theta * (p.c - p.c_tilde) / (4.0 * xi) + theta * p.c * (p.lambda - p.lambda_tilde) / (4.0 * eta * xi) +
               (p.lambda - p.lambda_tilde) / (2.0 * eta);
    if (!(cf.gamma >= 0.0) || !(eta * eta - xi * xi > 0.0)) {
        std::ostringstream os;
        os << "closed_form: invalid constants (Gamma = " << cf.gamma << ", eta^2 - xi^2 = " << eta * eta - xi * xi
           << ")";
        throw SolverError(os.str());
    }

    const double root_sum = std::sqrt(cf.gamma + 1.0) + std::sqrt(cf.gamma);
    const double log_bar = std::log(std::sqrt((eta + xi) / (eta - xi)) * root_sum);
    const double log_star = std::log(std::sqrt((eta - xi) / (eta + xi)) * root_sum);
    const double amp = std::sqrt(eta * eta - xi * xi) / (2.0 * theta);
    for (int i = 1; i <= 2; ++i) {
        const double sign = i == 1 ? -1.0 : 1.0;  // (-1)^i
        cf.x_bar[i - 1] = cf.s_tilde + sign / theta * log_bar;
        cf.x_star[i - 1] = cf.s_tilde + sign / theta * log_star;
        cf.a[i - 1] = std::exp(sign * theta * cf.s_tilde) * amp * (-sign * std::sqrt(cf.gamma + 1.0) - std::sqrt(cf.gamma));
    }

    const double lo_star = std::min(cf.x_star[0], cf.x_star[1]);
    const double hi_star = std::max(cf.x_star[0], cf.x_star[1]);
    if (!(cf.x_bar[0] < lo_star && hi_star < cf.x_bar[1])) {
        std::ostringstream os;
        os << "closed_form: thresholds do not bracket targets (x_bar = [" << cf.x_bar[0] << ", " << cf.x_bar[1]
           << "], x_star = [" << cf.x_star[0] << ", " << cf.x_star[1] << "])";
        throw SolverError(os.str());
    }
    return cf;
}

double exact_value(double x, Player player, const BenchmarkClosedForm& cf) {
    if (player == Player::first) return exact_value(2.0 * cf.s_tilde - x, Player::second, cf);
    const BenchmarkParams& p = cf.params;
    if (x <= cf.x_bar[0]) return cf.phi(cf.x_star[0]) + p.c_tilde + p.lambda_tilde * (cf.x_star[0] - x);
    if (x >= cf.x_bar[1]) return cf.phi(cf.x_star[1]) - p.c - p.lambda * (x - cf.x_star[1]);
    return cf.phi(x);
}

Field exact_field(const Grid& grid, Player player, const BenchmarkClosedForm& cf) {
    Field out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = exact_value(grid.node(k), player, cf);
    return out;
}

}  // namespace nzsig
