#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "magnus/errors.hpp"
#include "magnus/jsa.hpp"

using namespace magnus;

namespace {
const double kPi = std::numbers::pi;

struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}
    double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    DerivedParams params() {
        const double tau = uni(0.3, 2.0);
        return derive_params(tau, uni(-3.0, 3.0), uni(-3.0, 3.0));
    }
    std::vector<double> sorted(int n, double half) {
        std::vector<double> v(n);
        for (auto& x : v) x = uni(-half, half);
        std::sort(v.begin(), v.end());
        return v;
    }
};
}  // namespace

TEST(J1, Values) {
    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    EXPECT_NEAR(j1(d, 0.1, 1.0, {0, 0}), -0.1 / std::sqrt(kPi), 1e-15);
    EXPECT_NEAR(j1(d, 0.1, 1.0, {0, 0}), -0.0564190, 1e-7);

    const DerivedParams s = derive_params(1.0, 1.0, -1.0);
    EXPECT_NEAR(j1(s, 0.1, 1.0, {1, 1}), -(0.1 / std::sqrt(kPi)) * std::exp(-4.0), 1e-16);
    EXPECT_DOUBLE_EQ(j1(d, 0.1, 1.0, {0.3, -0.7}), j1(d, 0.1, 1.0, {-0.3, 0.7}));
    EXPECT_LT(j1(d, 0.1, 1.0, {0.3, -0.7}), 0.0);
    EXPECT_LT(std::abs(j1(d, 0.1, 1.0, {0.3, -0.7})), std::abs(j1(d, 0.1, 1.0, {0, 0})));
    EXPECT_THROW(j1(d, 0.1, 2.0, {0, 0}), ConfigError);
}

TEST(VCenter, Branches) {
    const DerivedParams z = derive_params(1.0, 1.0, -1.0);
    EXPECT_DOUBLE_EQ(v_center(z), kPi / (4 * z.R2));

    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    const double ref = std::atan(std::sqrt(31.0) / 3.0) / (2 * std::sqrt(31.0));
    EXPECT_NEAR(v_center(d), ref, 1e-15);
    EXPECT_NEAR(v_center(d), 0.0966798, 1e-7);

    // Continuity across mu^2 = 0 from both sides.
    const DerivedParams lo = derive_params(1.0, 1.0, -1.0 + 1e-9);
    const DerivedParams hi = derive_params(1.0, 1.0, -1.0 - 1e-9);
    EXPECT_NEAR(v_center(lo), v_center(z), 1e-8);
    EXPECT_NEAR(v_center(hi), v_center(z), 1e-8);

    Sampler s(3);
    for (int k = 0; k < 1000; ++k) {
        const DerivedParams p = s.params();
        EXPECT_LT(v_center(p), kPi / (3 * p.R2));
        EXPECT_GT(v_center(p), 0.0);
    }
}

TEST(VIntegral, CenterMatchesClosedForm) {
    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    EXPECT_NEAR(v_integral(d, {0, 0}), v_center(d), 1e-12);
    Sampler s(5);
    for (int k = 0; k < 30; ++k) {
        const DerivedParams p = s.params();
        EXPECT_NEAR(v_integral(p, {0, 0}), v_center(p), 1e-9 * v_center(p));
    }
}

TEST(VIntegral, NoMismatchIsConstant) {
    const DerivedParams p = derive_params(0.9, 1.4, 1.4);
    for (Detuning u : {Detuning{0, 0}, Detuning{1.5, -0.3}, Detuning{-4, 7}})
        EXPECT_NEAR(v_integral(p, u), kPi / (6 * p.R2), 1e-12);
}

TEST(VIntegral, BoundedByCenter) {
    Sampler s(9);
    for (int k = 0; k < 30; ++k) {
        const DerivedParams p = s.params();
        const Detuning u{s.uni(-2, 2), s.uni(-2, 2)};
        EXPECT_LE(std::abs(v_integral(p, u)), v_center(p) * (1 + 1e-12));
    }
}

TEST(VIntegral, FailureIsReported) {
    const DerivedParams p = derive_params(1.0, 2.0, -1.0);
    QuadratureSpec q;
    q.rel_tol = 1e-15;
    q.abs_tol = 1e-30;
    q.max_intervals = 2;
    EXPECT_THROW(v_integral(p, {3.0, 2.0}, q), QuadratureFailure);
}

TEST(J3, VanishesWithoutMismatchDifference) {
    for (double eps : {0.3, 1.0})
        for (double tau : {0.5, 1.0, 1.7}) {
            const DerivedParams p = derive_params(tau, 0.8, 0.8);
            for (Detuning u : {Detuning{0, 0}, Detuning{0.4, -1.1}, Detuning{-2, -2}})
                EXPECT_NEAR(j3(p, eps, tau, u), 0.0, 1e-12 * std::pow(eps * tau, 3));
        }
}

TEST(J3, CenterClosedForm) {
    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    const double ref = 2 * std::pow(kPi, 1.5) / (3 * std::sqrt(31.0)) -
                       4 * std::sqrt(kPi) * std::atan(std::sqrt(31.0) / 3) / (2 * std::sqrt(31.0));
    EXPECT_NEAR(j3(d, 1.0, 1.0, {0, 0}), ref, 1e-12);
    // Independent 5D oracle values for this configuration.
    EXPECT_NEAR(j3(d, 1.0, 1.0, {0, 0}), -0.018707521208485546, 1e-11);
    EXPECT_NEAR(j3(d, 1.0, 1.0, {0.3, -0.2}), -0.0443147, 1e-7);

    const DerivedParams s = derive_params(1.0, 1.0, -1.0);
    EXPECT_NEAR(j3(s, 1.0, 1.0, {0, 0}), -0.464027, 1e-6);
}

TEST(J3, BoundOnRandomSamples) {
    Sampler s(13);
    int n = 0;
    for (int k = 0; k < 100; ++k) {
        const DerivedParams p = s.params();
        const double eps = s.uni(0.05, 1.0);
        const double half = default_half_width(p, 3.0);
        const JsaTerms t = jsa_terms_grid(p, eps, p.tau, s.sorted(10, half), s.sorted(10, half));
        const double bound = j3_bound(p, eps, p.tau);
        for (Eigen::Index i = 0; i < 10; ++i)
            for (Eigen::Index j = 0; j < 10; ++j) {
                EXPECT_LE(std::abs(t.j3(i, j)), bound);
                const Detuning u{t.grid_a[i], t.grid_b[j]};
                EXPECT_LE(std::abs(w_term(p, eps, p.tau, u)) + z_term(p, eps, p.tau, u) * v_center(p),
                          3 * bound * (1 + 1e-12));
                ++n;
            }
    }
    EXPECT_EQ(n, 10000);
}

TEST(J3, GridMatchesPointwise) {
    Sampler s(17);
    for (int k = 0; k < 6; ++k) {
        const DerivedParams p = s.params();
        const double half = default_half_width(p, 3.0);
        const auto ga = s.sorted(5, half), gb = s.sorted(5, half);
        const JsaTerms t = jsa_terms_grid(p, 1.0, p.tau, ga, gb);
        const double bound = j3_bound(p, 1.0, p.tau);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                EXPECT_NEAR(t.j3(i, j), j3(p, 1.0, p.tau, {ga[i], gb[j]}), 1e-10 * bound);
    }
}

TEST(K3, Properties) {
    const DerivedParams d = derive_params(1.0, 2.0, -0.5);
    EXPECT_EQ(k3(d, 1.0, 1.0, {0, 0}), 0.0);
    const DerivedParams z = derive_params(1.0, 0.7, 0.7);
    EXPECT_EQ(k3(z, 1.0, 1.0, {0.5, -2.0}), 0.0);

    Sampler s(21);
    for (int k = 0; k < 100; ++k) {
        const double tau = s.uni(0.3, 2.0), ea = s.uni(-3, 3), eb = s.uni(-3, 3);
        const DerivedParams p = derive_params(tau, ea, eb);
        const DerivedParams q = derive_params(tau, eb, ea);
        const double a = s.uni(-2, 2), b = s.uni(-2, 2);
        const double x = k3(p, 0.5, tau, {a, b});
        EXPECT_NEAR(k3(q, 0.5, tau, {b, a}), x, 1e-13 * std::max(1.0, std::abs(x)));
    }
}

TEST(Jsa, ExchangeSymmetry) {
    const GaussianConfig c = config_from_mismatch(0.8, 1.7, -0.6, 0.4);
    GaussianConfig sw = c;
    std::swap(sw.s_a, sw.s_b);
    const DerivedParams p = derive_params(c), q = derive_params(sw);
    for (Detuning u : {Detuning{0.2, -0.5}, Detuning{1.0, 0.3}, Detuning{-0.7, -0.9}}) {
        const Detuning v{u.d_omega_b, u.d_omega_a};
        EXPECT_NEAR(j1(q, 0.4, 0.8, v), j1(p, 0.4, 0.8, u), 1e-15);
        EXPECT_NEAR(j3(q, 0.4, 0.8, v), j3(p, 0.4, 0.8, u), 1e-12);
        EXPECT_NEAR(k3(q, 0.4, 0.8, v), k3(p, 0.4, 0.8, u), 1e-14);
    }
}

TEST(Jsa, TotalAndLimits) {
    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    const auto c = jsa_total(d, 0.2, 1.0, {0, 0});
    EXPECT_EQ(c.imag(), 0.0);
    EXPECT_NEAR(c.real(), j1(d, 0.2, 1.0, {0, 0}) + j3(d, 0.2, 1.0, {0, 0}), 1e-16);
    const Detuning u{0.4, -0.3};
    double prev = 1.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double dev = std::abs(jsa_total(d, eps, 1.0, u) / eps - j1(d, eps, 1.0, u) / eps);
        EXPECT_LT(dev, prev);
        prev = dev;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(Jsa, DecayAlongRays) {
    // J1 dominates near the centre, so |J| falls monotonically there; further out the
    // third-order terms take over and only the exp(-uNu/3) envelope is guaranteed.
    const DerivedParams d = derive_params(1.0, 1.5, -0.8);
    const double eps = 0.1;
    const double centre = std::abs(jsa_total(d, eps, 1.0, {0, 0}));
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double th = k * kPi / 4;
        double prev = centre;
        for (double r = 0.1; r < 4.0; r += 0.1) {
            const Detuning u{r * std::cos(th), r * std::sin(th)};
            const double v = std::abs(jsa_total(d, eps, 1.0, u));
            if (std::abs(j1(d, eps, 1.0, u)) > 10 * j3_bound(d, eps, 1.0)) {
                EXPECT_LT(v, prev) << "angle " << k << " r " << r;
            }
            worst = std::max(worst, v * std::exp(form_N(d, u) / 3) / centre);
            prev = v;
        }
    }
    EXPECT_LT(worst, 2.0);
}

TEST(JsaGrid, SinglePointAndReversal) {
    const DerivedParams d = derive_params(1.0, 2.0, 1.0);
    const ComplexKernel one = jsa_grid(d, 0.5, 1.0, {0.0}, {0.0});
    EXPECT_NEAR(one.values(0, 0).real(), j1(d, 0.5, 1.0, {0, 0}) + j3(d, 0.5, 1.0, {0, 0}), 1e-14);
    EXPECT_EQ(one.values(0, 0).imag(), 0.0);

    const auto ga = linspace(-2, 2, 9), gb = linspace(-1.5, 2.5, 7);
    std::vector<double> ra(ga.rbegin(), ga.rend()), rb(gb.rbegin(), gb.rend());
    for (auto& x : ra) x = -x;
    for (auto& x : rb) x = -x;
    const ComplexKernel k = jsa_grid(d, 0.5, 1.0, ga, gb);
    // Reversed argument order on the negated grid is the parity image of the same kernel.
    const ComplexKernel r = jsa_grid(d, 0.5, 1.0, ra, rb);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 7; ++j) {
            EXPECT_NEAR(r.values(8 - i, 6 - j).real(), k.values(i, j).real(), 1e-14);
            EXPECT_NEAR(r.values(8 - i, 6 - j).imag(), -k.values(i, j).imag(), 1e-14);
        }
    EXPECT_THROW(jsa_grid(d, 0.5, 1.0, {1.0, 0.0}, {0.0}), ConfigError);
}

TEST(JsaGrid, Deterministic) {
    const DerivedParams d = derive_params(0.7, 2.5, -1.2);
    const auto g = linspace(-3, 3, 31);
    const ComplexKernel a = jsa_grid(d, 0.3, 0.7, g, g);
    const ComplexKernel b = jsa_grid(d, 0.3, 0.7, g, g);
    EXPECT_TRUE((a.values.array() == b.values.array()).all());
}

TEST(JsaGrid, TimeBudget64) {
    const DerivedParams d = derive_params(1.0, 2.0, -1.0);
    const double h = default_half_width(d, 4.0);
    const auto g = linspace(-h, h, 64);
    const auto t0 = std::chrono::steady_clock::now();
    const ComplexKernel k = jsa_grid(d, 0.3, 1.0, g, g);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(k.values.allFinite());
    EXPECT_LT(sec, 5.0);
}

TEST(J3Bound, Arithmetic) {
    const DerivedParams d = derive_params(1.0, 1.0, -1.0);
    EXPECT_NEAR(j3_bound(d, 1.0, 1.0), 2 * std::pow(kPi, 1.5) / 4, 1e-14);
    EXPECT_NEAR(j3_bound(d, 1.0, 1.0), 2.7842, 1e-4);
    EXPECT_NEAR(j3_bound(d, 0.5, 1.0), j3_bound(d, 1.0, 1.0) / 8, 1e-15);
}

TEST(Jsa, SingularFormsOnNullDirection) {
    // Equal mismatches make N and Q rank one; the anti-diagonal is their null direction.
    for (double tau : {0.7, 1.3})
        for (double x : {0.1, 3.7, 14.249409997581926}) {
            const DerivedParams p = derive_params(tau, -1.5, -1.5);
            EXPECT_GE(form_Q(p, {-x, x}), 0.0);
            EXPECT_GE(form_N(p, {-x, x}), 0.0);
            EXPECT_EQ(k3(p, 0.3, tau, {-x, x}), 0.0);
        }
}

TEST(Jsa, QuadraticFormsMatchMatrices) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3, 3), t(0.2, 2);
    for (int k = 0; k < 200; ++k) {
        const double tau = t(rng);
        const DerivedParams p = derive_params(tau, u(rng), u(rng));
        const Eigen::Vector2d v(u(rng), u(rng));
        const double n = v.dot(p.N * v), q = v.dot(p.Q * v);
        EXPECT_NEAR(form_N(p, {v(0), v(1)}), n, 1e-12 * (1 + std::abs(n)));
        EXPECT_NEAR(form_Q(p, {v(0), v(1)}), q, 1e-11 * (1 + std::abs(q)));
    }
}
