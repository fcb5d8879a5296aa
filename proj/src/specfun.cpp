#include "magnus/specfun.hpp"

#include <cmath>
#include <numbers>

#include "magnus/errors.hpp"

namespace magnus {

namespace {

// Alternating series D(x) = sum_k (-1)^k 2^k x^{2k+1} / (2k+1)!!, fine for |x| < 1.
double dawson_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int k = 1; k < 60; ++k) {
        term *= -2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Rybicki's sampling formula: D(x) ~ pi^{-1/2} sum_{n odd} exp(-(x0 - n h)^2) / (n + n0),
// with x = x0 + n0 h. Aliasing error is of order exp(-(pi / 2h)^2).
double dawson_rybicki(double x) {
    constexpr double h = 0.2;
    constexpr int nmax = 41;  // exp(-(nmax h)^2) underflows relative to the sum
    const double ax = std::abs(x);
    const int n0 = 2 * static_cast<int>(std::lround(0.5 * ax / h));
    const double xp = ax - n0 * h;
    double sum = 0.0;
    for (int n = -nmax; n <= nmax; n += 2) {
        const double d = xp - n * h;
        sum += std::exp(-d * d) / static_cast<double>(n + n0);
    }
    const double r = sum / std::sqrt(std::numbers::pi);
    return x < 0 ? -r : r;
}

// D(x) ~ 1/(2x) sum_k (2k-1)!! / (2x^2)^k, truncated at the smallest term.
double dawson_asymptotic(double x) {
    const double inv = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        const double next = term * (2.0 * k - 1.0) * inv;
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum / (2.0 * x);
}

}  // namespace

double dawson(double x) {
    const double ax = std::abs(x);
    if (ax < 1.0) return dawson_series(x);
    if (ax <= 10.0) return dawson_rybicki(x);
    return dawson_asymptotic(x);
}

double erfi(double x) {
    if (!std::isfinite(x) || std::abs(x) > kErfiMaxArg)
        throw OverflowError("erfi argument out of representable range");
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(x * x) * dawson(x);
}

double gauss_erfi(double E, double y) {
    if (!(E >= 0)) throw OverflowError("gauss_erfi needs a non-negative Gaussian exponent");
    if (y == 0.0) return 0.0;
    const double ex = y * y - E;
    if (!std::isfinite(ex) || ex > kMaxExponent)
        throw OverflowError("gauss_erfi exponent y^2 - E exceeds the representable range");
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(ex) * dawson(y);
}

double hermite(int n, double x) {
    if (n < 0 || n > kHermiteMaxDegree) throw ConfigError("hermite degree out of range");
    if (n == 0) return 1.0;
    double hm = 1.0;
    double h = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        const double hn = 2.0 * x * h - 2.0 * k * hm;
        hm = h;
        h = hn;
    }
    return h;
}

double hermite_function(int n, double x) {
    if (n < 0 || n > kHermiteMaxDegree) throw ConfigError("hermite degree out of range");
    // psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}
    double pm = 0.0;
    double p = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
    for (int k = 0; k < n; ++k) {
        const double pn = std::sqrt(2.0 / (k + 1)) * x * p - std::sqrt(double(k) / (k + 1)) * pm;
        pm = p;
        p = pn;
    }
    return p;
}

}  // namespace magnus
