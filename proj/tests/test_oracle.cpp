#include <gtest/gtest.h>

#include <chrono>
#include <functional>
#include <cmath>
#include <numbers>
#include <random>

#include "magnus/jsa.hpp"
#include "magnus/oracle.hpp"
#include "magnus/quadrature.hpp"

using namespace magnus;

namespace {

GaussianConfig cfg(double tau, double ea, double eb, double eps) { return config_from_mismatch(tau, ea, eb, eps); }

}  // namespace

TEST(FFunction, Origin) {
    const GaussianConfig c = cfg(1.0, 2.0, 1.0, 0.3);
    const cplx f = f_function(c, 0, 0, 0);
    EXPECT_NEAR(f.real(), -0.3 / std::sqrt(c.s_p * c.s_p + 1.0), 1e-15);
    EXPECT_EQ(f.imag(), 0.0);
}

TEST(FFunction, ConjugationInTime) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2, 2), t(-6, 6);
    const GaussianConfig c = cfg(0.8, 1.5, -0.6, 0.2);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng), y = u(rng), s = t(rng);
        const cplx a = f_function(c, x, y, s), b = std::conj(f_function(c, x, y, -s));
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-14 * std::max(1.0, std::abs(a)));
    }
}

TEST(FFunction, TimeIntegralIsJ1) {
    // Integrating over t restores the pump delta and gives 2 pi J1.
    for (auto [ea, eb] : {std::pair{2.0, 1.0}, std::pair{1.0, -1.0}}) {
        const GaussianConfig c = cfg(1.0, ea, eb, 0.1);
        const DerivedParams p = derive_params(c);
        for (Detuning u : {Detuning{0, 0}, Detuning{0.3, -0.2}, Detuning{-0.5, 0.4}}) {
            const double span = default_t_span(c);
            std::function<double(double)> re = [&](double t) { return f_function(c, u.d_omega_a, u.d_omega_b, t).real(); };
            std::function<double(double)> im = [&](double t) { return f_function(c, u.d_omega_a, u.d_omega_b, t).imag(); };
            const double I = integrate_adaptive(re, -span, span, 1e-15, 1e-13, 2000).value;
            const double Ii = integrate_adaptive(im, -span, span, 1e-15, 1e-13, 2000).value;
            EXPECT_NEAR(I, 2 * std::numbers::pi * j1(p, 0.1, 1.0, u), 1e-12);
            EXPECT_NEAR(Ii, 0.0, 1e-13);
        }
    }
}

TEST(OracleJ3, ZeroWhenMismatchesEqual) {
    const GaussianConfig c = cfg(1.0, 0.7, 0.7, 1.0);
    const DerivedParams p = derive_params(c);
    EXPECT_NEAR(oracle_j3(c, {0.1, 0.2}), 0.0, 1e-12 * j3_bound(p, 1.0, 1.0) + 1e-14);
}

TEST(OracleJ3, MatchesClosedFormAtCenter) {
    const GaussianConfig c = cfg(1.0, 2.0, 1.0, 1.0);
    const DerivedParams p = derive_params(c);
    const auto t0 = std::chrono::steady_clock::now();
    const double o = oracle_j3(c, {0, 0});
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double ref = j3(p, 1.0, 1.0, {0, 0});
    EXPECT_NEAR(o / ref, 1.0, 1e-4) << o << " " << ref << " in " << dt << " s";
}

TEST(OracleJ3, CubicInEpsilon) {
    const GaussianConfig a = cfg(1.0, 1.0, -1.0, 1.0);
    const GaussianConfig b = cfg(1.0, 1.0, -1.0, 2.0);
    const double ra = oracle_j3(a, {0.2, -0.1}), rb = oracle_j3(b, {0.2, -0.1});
    EXPECT_NEAR(rb / ra, 8.0, 1e-9);
}

TEST(OracleJ3, OffCenterPoints) {
    const GaussianConfig c = cfg(1.0, 1.0, -1.0, 1.0);
    const DerivedParams p = derive_params(c);
    for (Detuning u : {Detuning{0.3, -0.2}, Detuning{-0.4, 0.5}}) {
        const double ref = j3(p, 1.0, 1.0, u);
        EXPECT_NEAR(oracle_j3(c, u) / ref, 1.0, 1e-4) << u.d_omega_a << " " << u.d_omega_b;
    }
}
