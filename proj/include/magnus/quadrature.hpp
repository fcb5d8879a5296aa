#pragma once

#include <functional>
#include <vector>

namespace magnus {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre on [-1, 1].
Rule gauss_legendre(int n);
// Gauss-Hermite for weight exp(-x^2) on the real line.
Rule gauss_hermite(int n);
// Panel-wise Gauss-Legendre on [a, b].
Rule composite_gauss_legendre(double a, double b, int panels, int order);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

// Globally adaptive 15-point Gauss-Kronrod on a finite interval. Stops when the summed
// error estimate is below max(abs_tol, rel_tol*|value|) or max_intervals is reached.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_intervals);

}  // namespace magnus
