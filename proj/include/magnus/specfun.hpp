#pragma once

namespace magnus {

// Largest |x| for which erfi(x) is finite in double precision.
inline constexpr double kErfiMaxArg = 26.6;
// Largest value of y^2 - E accepted by gauss_erfi.
inline constexpr double kMaxExponent = 709.0;
inline constexpr int kHermiteMaxDegree = 100;

// e^{-x^2} int_0^x e^{t^2} dt.
double dawson(double x);

// Imaginary error function; throws OverflowError for |x| > kErfiMaxArg.
double erfi(double x);

// e^{-E} * erfi(y) without forming either factor separately.
double gauss_erfi(double E, double y);

// Physicists' Hermite polynomial H_n(x), n <= kHermiteMaxDegree.
double hermite(int n, double x);

// Orthonormal Hermite function H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)).
double hermite_function(int n, double x);

}  // namespace magnus
