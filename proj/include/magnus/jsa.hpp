#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "magnus/model.hpp"

namespace magnus {

struct Detuning {
    double d_omega_a = 0.0;
    double d_omega_b = 0.0;
};

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;        // <= 0 selects 1e-12 / R^2
    int max_intervals = 4000;    // per one-dimensional adaptive integration
};

struct ComplexKernel {
    std::vector<double> grid_a;
    std::vector<double> grid_b;
    Eigen::MatrixXcd values;  // rows follow grid_a, columns grid_b
    std::string normalization_note;

    void validate() const;
};

// Real-valued grids of the separate terms, same layout as ComplexKernel::values.
struct JsaTerms {
    std::vector<double> grid_a;
    std::vector<double> grid_b;
    Eigen::MatrixXd j1, j3, k3;
};

double j1(const DerivedParams& p, double eps, double tau, Detuning u);

// Quadratic forms used throughout; exposed for tests and the bound checks.
double form_N(const DerivedParams& p, Detuning u);
double form_Q(const DerivedParams& p, Detuning u);

double v_center(const DerivedParams& p);
double v_integral(const DerivedParams& p, Detuning u, const QuadratureSpec& quad = {});

double w_term(const DerivedParams& p, double eps, double tau, Detuning u);
double z_term(const DerivedParams& p, double eps, double tau, Detuning u);

double j3(const DerivedParams& p, double eps, double tau, Detuning u,
          const QuadratureSpec& quad = {});
double k3(const DerivedParams& p, double eps, double tau, Detuning u);

std::complex<double> jsa_total(const DerivedParams& p, double eps, double tau, Detuning u,
                               const QuadratureSpec& quad = {});

// The quadrature spec only applies to points that fall back to adaptive V integration.
JsaTerms jsa_terms_grid(const DerivedParams& p, double eps, double tau,
                        const std::vector<double>& grid_a, const std::vector<double>& grid_b,
                        const QuadratureSpec& quad = {});
ComplexKernel jsa_grid(const DerivedParams& p, double eps, double tau,
                       const std::vector<double>& grid_a, const std::vector<double>& grid_b,
                       const QuadratureSpec& quad = {});

double j3_bound(const DerivedParams& p, double eps, double tau);

std::vector<double> linspace(double a, double b, int n);
// Half-width span / sqrt(lambda_min(N)); lambda_min is floored at 1e-2 lambda_max so that
// the infinitely entangled case eta_ab = 0 still gets a finite window.
double default_half_width(const DerivedParams& p, double span = 4.0);

}  // namespace magnus
