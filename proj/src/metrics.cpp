#include "magnus/metrics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

#include "magnus/errors.hpp"

namespace magnus {

SchmidtValue schmidt_analytic(const DerivedParams& p) {
    SchmidtValue s;
    if (!(p.detN > 0)) {
        s.value = std::numeric_limits<double>::infinity();
        s.divergent = true;
        return s;
    }
    s.value = std::sqrt(p.mua2 * p.mub2 / p.detN);
    return s;
}

SchmidtReport schmidt_numeric(const ComplexKernel& kernel) {
    kernel.validate();
    const auto& K = kernel.values;
    const Eigen::Index na = K.rows(), nb = K.cols();
    const double peak = K.cwiseAbs().maxCoeff();
    if (!(peak > 0)) throw GridTooNarrow("kernel vanishes on the grid");
    double edge = 0.0;
    if (na > 1 && nb > 1) {
        edge = std::max({K.row(0).cwiseAbs().maxCoeff(), K.row(na - 1).cwiseAbs().maxCoeff(),
                         K.col(0).cwiseAbs().maxCoeff(), K.col(nb - 1).cwiseAbs().maxCoeff()});
    }
    if (edge > 1e-8 * peak) throw GridTooNarrow("kernel boundary exceeds 1e-8 of its peak");

    auto step = [](const std::vector<double>& g) {
        return g.size() > 1 ? (g.back() - g.front()) / double(g.size() - 1) : 1.0;
    };
    const double wgt = std::sqrt(step(kernel.grid_a) * step(kernel.grid_b));

    SchmidtReport r;
    if (K.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::MatrixXd A = K.real() * wgt;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
        const auto& s = svd.singularValues();
        r.singular_values.assign(s.data(), s.data() + s.size());
    } else {
        Eigen::MatrixXcd A = K * wgt;
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
        const auto& s = svd.singularValues();
        r.singular_values.assign(s.data(), s.data() + s.size());
    }
    double s2 = 0.0, s4 = 0.0;
    for (double s : r.singular_values) {
        s2 += s * s;
        s4 += s * s * s * s;
    }
    r.schmidt_number = s2 * s2 / s4;
    return r;
}

double tau2_over_r2(const DerivedParams& p, double tau) { return tau * tau / p.R2; }

double fom_r_bound(const DerivedParams& p, double eps, double tau) {
    return 2.0 * std::numbers::pi * std::numbers::pi * eps * eps * tau2_over_r2(p, tau);
}

double fom_r_measured(const Eigen::MatrixXd& j1_grid, const Eigen::MatrixXd& j3_grid) {
    if (j1_grid.rows() != j3_grid.rows() || j1_grid.cols() != j3_grid.cols())
        throw ConfigError("J1 and J3 grids are not co-registered");
    const double m1 = j1_grid.cwiseAbs().maxCoeff();
    if (!(m1 > 0)) throw GridTooNarrow("J1 vanishes on the grid");
    return j3_grid.cwiseAbs().maxCoeff() / m1;
}

CopropagationTimes copropagation_times(const PhysicalSetup& setup) {
    setup.validate();
    CopropagationTimes t;
    t.transit_a = setup.L / setup.v_a;
    t.transit_b = setup.L / setup.v_b;
    auto walk = [&](double v, bool& flag) {
        const double dv = std::abs(v - setup.v_p);
        if (dv == 0.0) {
            flag = true;
            return std::numeric_limits<double>::infinity();
        }
        return setup.v_p * setup.tau / dv;
    };
    t.walkoff_a = walk(setup.v_a, t.infinite_walkoff_a);
    t.walkoff_b = walk(setup.v_b, t.infinite_walkoff_b);
    return t;
}

}  // namespace magnus
