#pragma once

#include <Eigen/Dense>
#include <string>

namespace magnus {

enum class Process { SPDC, SFWM, FC };

std::string to_string(Process p);
Process process_from_string(const std::string& s);

// Five model scalars plus central frequencies. Times in a user-chosen unit,
// frequencies in rad per that unit.
struct GaussianConfig {
    double tau = 1.0;
    double s_a = 1.0;
    double s_b = 1.0;
    double s_p = 1.0;
    double epsilon = 0.0;
    double omega_bar_a = 0.0;
    double omega_bar_b = 0.0;
    double omega_bar_p = 0.0;
    Process process = Process::SPDC;

    // Throws ConfigError when an invariant is violated.
    void validate() const;
};

// Builds a config with prescribed mismatches; s_p is chosen so that every slope is positive.
GaussianConfig config_from_mismatch(double tau, double eta_a, double eta_b, double epsilon,
                                    double s_p = 0.0);

struct DerivedParams {
    double tau = 0.0;
    double eta_a = 0.0, eta_b = 0.0, eta_ab = 0.0;
    double mu2 = 0.0, mua2 = 0.0, mub2 = 0.0;
    double R4 = 0.0, R2 = 0.0;
    double M4 = 0.0;
    double calN4 = 0.0, calN2 = 0.0;
    double detN = 0.0;  // mua2*mub2 - mu2^2 = tau^2 eta_ab^2
    Eigen::Matrix2d N, Q, M, W;

    double mua() const;
    double mub() const;
};

DerivedParams derive_params(const GaussianConfig& config);
DerivedParams derive_params(double tau, double eta_a, double eta_b);

struct PhysicalSetup {
    double L = 0.0;      // length unit
    double gamma = 0.193;
    double v_a = 0.0, v_b = 0.0, v_p = 0.0;  // length per time unit
    double tau = 0.0;
    double epsilon = 0.0;
    double omega_bar_a = 0.0, omega_bar_b = 0.0, omega_bar_p = 0.0;
    Process process = Process::SPDC;

    void validate() const;
};

GaussianConfig from_physical(const PhysicalSetup& setup);

// Root of sin(x)/x = 1/2 on (0, pi).
double sinc_half_point();
// gamma = ln 2 / x_half^2, matching the FWHM of sinc(x) and exp(-gamma x^2).
double matching_gamma();

}  // namespace magnus
