#pragma once

#include <complex>
#include <vector>

#include "magnus/jsa.hpp"
#include "magnus/model.hpp"

namespace magnus {

enum class Side { A, B };

inline constexpr int kFcMaxMode = 32;

struct SeedProfile {
    std::complex<double> nu{1.0, 0.0};
    double tau_a = 1.0;  // f(d) = nu exp(-tau_a^2 d^2)
};

struct FcModeSpec {
    int j = 0;
    double S = 1.0;
    double s = 0.0;
    double theta0 = 0.0;
};

// Second-order FC kernel G2 on the a side, G2(d, d') with d = d_omega_a, d' = d_omega_a'.
double g2(const DerivedParams& p, double eps, double tau, double d, double dprime);
// Same kernel for the b side (a <-> b swap).
double g2b(const DerivedParams& p, double eps, double tau, double d, double dprime);

// delta f(d) = -2 pi i int dd' f(d') G2(d, d'), by adaptive quadrature.
std::vector<std::complex<double>> dressed_seed(const DerivedParams& p, double eps, double tau,
                                               const SeedProfile& seed,
                                               const std::vector<double>& grid,
                                               const QuadratureSpec& quad = {});

// Flat-seed limit of dressed_seed.
std::complex<double> dressed_seed_closed(const DerivedParams& p, double eps, double tau,
                                         std::complex<double> nu, double d_omega_a);

// Argument q of the flat-seed closed form.
double seed_q(const DerivedParams& p, double d_omega_a);

double xi_constant();
double xi_maximizer();

double rho(const DerivedParams& p, double eps, double tau);

double fc_kernel_j1(const DerivedParams& p, double eps, double tau, Detuning u);

FcModeSpec fc_mode_spec(const DerivedParams& p, double eps, double tau, int j = 0);
double fc_coupling(const DerivedParams& p, double eps, double tau, int j);
std::vector<double> fc_mode(const DerivedParams& p, int j, Side side, const std::vector<double>& grid);

double solve_epsilon_for_full_conversion(const DerivedParams& p, double tau, int n);

}  // namespace magnus
