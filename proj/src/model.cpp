#include "magnus/model.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "magnus/errors.hpp"

namespace magnus {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

bool rel_close(double x, double y, double rtol) {
    double scale = std::max({std::abs(x), std::abs(y), std::numeric_limits<double>::min()});
    return std::abs(x - y) <= rtol * scale;
}

constexpr double kEnergyTol = 1e-9;

}  // namespace

std::string to_string(Process p) {
    switch (p) {
        case Process::SPDC: return "SPDC";
        case Process::SFWM: return "SFWM";
        case Process::FC: return "FC";
    }
    return "SPDC";
}

Process process_from_string(const std::string& s) {
    if (s == "SPDC" || s == "spdc") return Process::SPDC;
    if (s == "SFWM" || s == "sfwm") return Process::SFWM;
    if (s == "FC" || s == "fc") return Process::FC;
    throw ConfigError("unknown process '" + s + "'");
}

void GaussianConfig::validate() const {
    if (!finite_all({tau, s_a, s_b, s_p, epsilon, omega_bar_a, omega_bar_b, omega_bar_p}))
        throw ConfigError("config contains non-finite values");
    if (!(tau > 0)) throw ConfigError("tau must be positive");
    if (!(s_a > 0 && s_b > 0 && s_p > 0)) throw ConfigError("phase-matching slopes must be positive");
    if (epsilon < 0) throw ConfigError("epsilon must be non-negative");
    switch (process) {
        case Process::SPDC:
            if (!rel_close(omega_bar_a + omega_bar_b, omega_bar_p, kEnergyTol))
                throw ConfigError("SPDC requires omega_a + omega_b = omega_p");
            break;
        case Process::FC:
            if (!rel_close(omega_bar_b - omega_bar_a, omega_bar_p, kEnergyTol))
                throw ConfigError("FC requires omega_b - omega_a = omega_p");
            break;
        case Process::SFWM:
            // omega_bar_p carries twice the pump frequency; same bookkeeping as SPDC.
            if (!rel_close(omega_bar_a + omega_bar_b, omega_bar_p, kEnergyTol))
                throw ConfigError("SFWM requires omega_a + omega_b = omega_p (twice the pump)");
            break;
    }
}

GaussianConfig config_from_mismatch(double tau, double eta_a, double eta_b, double epsilon,
                                    double s_p) {
    GaussianConfig c;
    c.tau = tau;
    c.epsilon = epsilon;
    if (s_p <= 0) s_p = 1.0 + std::max({0.0, eta_a, eta_b});
    c.s_p = s_p;
    c.s_a = s_p - eta_a;
    c.s_b = s_p - eta_b;
    c.validate();
    return c;
}

double DerivedParams::mua() const { return std::sqrt(mua2); }
double DerivedParams::mub() const { return std::sqrt(mub2); }

DerivedParams derive_params(double tau, double eta_a, double eta_b) {
    if (!finite_all({tau, eta_a, eta_b}) || !(tau > 0))
        throw ConfigError("derive_params needs finite tau > 0 and finite mismatches");
    DerivedParams d;
    const double t2 = tau * tau;
    d.tau = tau;
    d.eta_a = eta_a;
    d.eta_b = eta_b;
    d.eta_ab = eta_a - eta_b;
    d.mu2 = t2 + eta_a * eta_b;
    d.mua2 = t2 + eta_a * eta_a;
    d.mub2 = t2 + eta_b * eta_b;

    const double mu4 = d.mu2 * d.mu2;
    const double e2 = d.eta_ab * d.eta_ab;
    // Sum of non-negative terms; the 4 mua2 mub2 - mu4 form cancels badly.
    d.R4 = 4.0 * e2 * t2 + 3.0 * mu4;
    d.R2 = std::sqrt(d.R4);
    d.M4 = 4.0 * d.mua2 * d.mub2 - 3.0 * mu4;
    d.calN4 = mu4 + 2.0 * t2 * e2;
    d.calN2 = std::sqrt(d.calN4);
    d.detN = d.mua2 * d.mub2 - mu4;

    const double scale = d.mua2 * d.mub2;
    if (d.detN < -64 * std::numeric_limits<double>::epsilon() * scale)
        throw DegenerateModel("mua^2 mub^2 - mu^4 is negative");
    d.detN = t2 * e2;  // exact value of the same determinant

    const double mu6 = mu4 * d.mu2;
    d.N << d.mua2, d.mu2, d.mu2, d.mub2;
    d.Q << d.M4 * d.mua2, mu6, mu6, d.M4 * d.mub2;
    d.M << 2.0 * d.mua2, d.mu2, d.mu2, 2.0 * d.mub2;
    d.W << 2.0 * d.mua2, -d.mu2, -d.mu2, 2.0 * d.mub2;

    if (!finite_all({d.R4, d.M4, d.calN4}) || d.R2 <= 0)
        throw DegenerateModel("derived parameters are not finite or R^2 vanishes");
    return d;
}

DerivedParams derive_params(const GaussianConfig& config) {
    config.validate();
    return derive_params(config.tau, config.s_p - config.s_a, config.s_p - config.s_b);
}

void PhysicalSetup::validate() const {
    if (!finite_all({L, gamma, v_a, v_b, v_p, tau, epsilon}))
        throw ConfigError("physical setup contains non-finite values");
    if (!(L > 0)) throw ConfigError("crystal length must be positive");
    if (!(gamma > 0)) throw ConfigError("gamma must be positive");
    if (!(v_a > 0 && v_b > 0 && v_p > 0)) throw ConfigError("group velocities must be positive");
    if (!(tau > 0)) throw ConfigError("tau must be positive");
    if (epsilon < 0) throw ConfigError("epsilon must be non-negative");
}

GaussianConfig from_physical(const PhysicalSetup& setup) {
    setup.validate();
    const double k = std::sqrt(setup.gamma) * setup.L / 2.0;
    GaussianConfig c;
    c.tau = setup.tau;
    c.epsilon = setup.epsilon;
    c.s_a = k / setup.v_a;
    c.s_b = k / setup.v_b;
    c.s_p = k / setup.v_p;
    c.omega_bar_a = setup.omega_bar_a;
    c.omega_bar_b = setup.omega_bar_b;
    c.omega_bar_p = setup.omega_bar_p;
    c.process = setup.process;
    c.validate();
    return c;
}

double sinc_half_point() {
    auto f = [](double x) { return std::sin(x) / x - 0.5; };
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto r = boost::math::tools::toms748_solve(f, 1.0, 3.0, tol, iters);
    return 0.5 * (r.first + r.second);
}

double matching_gamma() {
    const double x = sinc_half_point();
    return std::log(2.0) / (x * x);
}

}  // namespace magnus
