#include "magnus/fconv.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "magnus/errors.hpp"
#include "magnus/metrics.hpp"
#include "magnus/quadrature.hpp"
#include "magnus/specfun.hpp"

namespace magnus {

namespace {

constexpr double kPi = std::numbers::pi;

double g2_impl(double eps, double tau, double eta_other_minus_self, double mu_self,
               double mu_other, double d, double dp) {
    const double xp = tau * eta_other_minus_self * (dp + d) / (std::sqrt(2.0) * mu_other);
    const double xm = (d - dp) * mu_self / std::sqrt(2.0);
    return eps * eps * std::sqrt(kPi / 2.0) * (tau * tau / mu_other) *
           gauss_erfi(xm * xm + xp * xp, xp);
}

}  // namespace

double g2(const DerivedParams& p, double eps, double tau, double d, double dprime) {
    return g2_impl(eps, tau, -p.eta_ab, p.mua(), p.mub(), d, dprime);
}

double g2b(const DerivedParams& p, double eps, double tau, double d, double dprime) {
    return g2_impl(eps, tau, p.eta_ab, p.mub(), p.mua(), d, dprime);
}

std::vector<std::complex<double>> dressed_seed(const DerivedParams& p, double eps, double tau,
                                               const SeedProfile& seed,
                                               const std::vector<double>& grid,
                                               const QuadratureSpec& quad) {
    if (!(seed.tau_a > 0)) throw ConfigError("seed duration must be positive");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError("grid must be strictly increasing");
    // exp(-x_-^2) confines d' to a window around d.
    const double half = 6.5 * std::sqrt(2.0) / p.mua();
    const double scale = eps * eps * tau * tau / p.calN2;
    std::vector<std::complex<double>> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid[i];
        if (eps == 0.0 || p.eta_ab == 0.0) continue;
        auto f = [&](double dp) {
            return std::exp(-seed.tau_a * seed.tau_a * dp * dp) * g2(p, eps, tau, d, dp);
        };
        QuadResult r = integrate_adaptive(f, d - half, d + half, 1e-14 * scale, quad.rel_tol,
                                          quad.max_intervals);
        if (!r.converged) throw QuadratureFailure("dressed seed integral did not converge", "d_omega_a'");
        out[i] = std::complex<double>(0.0, -2.0 * kPi) * seed.nu * r.value;
    }
    return out;
}

double seed_q(const DerivedParams& p, double d_omega_a) {
    return std::sqrt(2.0) * d_omega_a * p.eta_ab * p.tau * p.mua() / p.calN2;
}

std::complex<double> dressed_seed_closed(const DerivedParams& p, double eps, double tau,
                                         std::complex<double> nu, double d_omega_a) {
    if (!(p.calN2 > 0)) throw DegenerateModel("calN^2 must be positive");
    const double q = seed_q(p, d_omega_a);
    // int dd' G2(d, d') = -eps^2 (pi tau^2 / calN^2) e^{-q^2} erfi(q)
    const double integral = -eps * eps * kPi * tau * tau / p.calN2 * gauss_erfi(q * q, q);
    return std::complex<double>(0.0, -2.0 * kPi) * nu * integral;
}

double xi_maximizer() {
    auto negf = [](double q) { return -gauss_erfi(q * q, q); };
    auto r = boost::math::tools::brent_find_minima(negf, 0.1, 3.0, std::numeric_limits<double>::digits);
    return r.first;
}

double xi_constant() {
    const double q = xi_maximizer();
    return gauss_erfi(q * q, q);
}

double rho(const DerivedParams& p, double eps, double tau) {
    if (!(p.calN2 > 0)) throw DegenerateModel("calN^2 must be positive");
    return 2.0 * kPi * kPi * kPi * xi_constant() * eps * eps * tau * tau / p.calN2;
}

double fc_kernel_j1(const DerivedParams& p, double eps, double tau, Detuning u) {
    return j1(p, eps, tau, Detuning{-u.d_omega_a, u.d_omega_b});
}

FcModeSpec fc_mode_spec(const DerivedParams& p, double eps, double tau, int j) {
    const SchmidtValue sv = schmidt_analytic(p);
    if (sv.divergent) throw DegenerateModel("FC kernel has infinite Schmidt number");
    FcModeSpec m;
    m.j = j;
    m.S = sv.value;
    m.s = std::sqrt((m.S - 1.0) / (m.S + 1.0));
    m.theta0 = 2.0 * kPi * eps * tau / std::sqrt(2.0 * p.mua() * p.mub());
    return m;
}

double fc_coupling(const DerivedParams& p, double eps, double tau, int j) {
    if (j < 0) throw ConfigError("mode index must be non-negative");
    const FcModeSpec m = fc_mode_spec(p, eps, tau, j);
    const double sj = (j == 0) ? 1.0 : std::pow(m.s, j);
    return m.theta0 * std::sqrt(1.0 + m.s * m.s) * sj;
}

std::vector<double> fc_mode(const DerivedParams& p, int j, Side side, const std::vector<double>& grid) {
    if (j < 0 || j > kFcMaxMode) throw ConfigError("mode index outside [0, 32]");
    const SchmidtValue sv = schmidt_analytic(p);
    if (sv.divergent) throw DegenerateModel("FC kernel has infinite Schmidt number");
    const double S = sv.value;
    const double mu = side == Side::A ? p.mua() : p.mub();
    const double sign = side == Side::A ? -1.0 : 1.0;
    const double width = std::sqrt(S / 2.0);
    const double amp = std::sqrt(mu / width);
    if (grid.empty()) throw ConfigError("empty grid");
    for (double edge : {grid.front(), grid.back()}) {
        if (std::abs(hermite_function(j, sign * mu * edge / width)) * amp > 1e-8)
            throw GridTooNarrow("mode tail exceeds 1e-8 at the grid boundary");
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = amp * hermite_function(j, sign * mu * grid[i] / width);
    return out;
}

double solve_epsilon_for_full_conversion(const DerivedParams& p, double tau, int n) {
    const double g_unit = fc_coupling(p, 1.0, tau, n);
    if (!(g_unit > 0))
        throw DegenerateModel("coupling g_n vanishes for this geometry; full conversion unreachable");
    return (kPi / 2.0) / g_unit;
}

}  // namespace magnus
