#pragma once

#include <Eigen/Dense>
#include <vector>

#include "magnus/jsa.hpp"
#include "magnus/model.hpp"

namespace magnus {

struct SchmidtValue {
    double value = 1.0;      // +infinity when divergent
    bool divergent = false;
};

struct SchmidtReport {
    double schmidt_number = 1.0;
    std::vector<double> singular_values;
    bool has_analytic = false;
    double analytic_value = 0.0;
};

SchmidtValue schmidt_analytic(const DerivedParams& p);

// Throws GridTooNarrow if the kernel boundary exceeds 1e-8 of its peak magnitude.
SchmidtReport schmidt_numeric(const ComplexKernel& kernel);

double tau2_over_r2(const DerivedParams& p, double tau);
double fom_r_bound(const DerivedParams& p, double eps, double tau);
// max|J3| / max|J1| over co-registered grids.
double fom_r_measured(const Eigen::MatrixXd& j1_grid, const Eigen::MatrixXd& j3_grid);

struct CopropagationTimes {
    double walkoff_a = 0.0, walkoff_b = 0.0;  // v_p tau / |v_i - v_p|
    double transit_a = 0.0, transit_b = 0.0;  // L / v_i
    bool infinite_walkoff_a = false, infinite_walkoff_b = false;
};

CopropagationTimes copropagation_times(const PhysicalSetup& setup);

}  // namespace magnus
