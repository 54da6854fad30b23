#pragma once

#include <vector>

namespace modalstab::special {

/// Largest Bessel order / spherical degree accepted by the public evaluators.
inline constexpr int kMaxOrder = 60;

/// Cylindrical Bessel function of the first kind J_order(x), x >= 0.
///
/// Uses the power series while (x/2)^2 <= 2 (order + 1) or x <= 8 and Miller's
/// backward recurrence (normalised by J_0 + 2 sum J_2k = 1) otherwise; both
/// are accumulated in extended precision.
double bessel_j(int order, double x);

/// d/dx J_order(x).
double bessel_j_derivative(int order, double x);

/// k-th positive zero of J_order (k >= 1).
double bessel_j_zero(int order, int k);

/// All positive zeros of J_order strictly below `limit`, increasing.
std::vector<double> bessel_j_zeros_below(int order, double limit);

/// Spherical Bessel function j_degree(x) = sqrt(pi / 2x) J_{degree+1/2}(x).
double spherical_bessel_j(int degree, double x);

double spherical_bessel_j_derivative(int degree, double x);

/// k-th positive zero of j_degree (k >= 1).
double spherical_bessel_zero(int degree, int k);

std::vector<double> spherical_bessel_zeros_below(int degree, double limit);

/// Real spherical harmonic, orthonormal on the unit sphere, no Condon-Shortley
/// phase. m > 0 carries cos(m phi), m < 0 carries sin(|m| phi).
double real_spherical_harmonic(int l, int m, double theta, double phi);

/// Every real harmonic with degree <= lmax at one direction, stored at index
/// l*l + l + m.
std::vector<double> real_spherical_harmonics(int lmax, double theta, double phi);

enum class QuadratureKind { gauss_legendre, periodic_trapezoid };

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre (exact to degree 2n-1) or periodic trapezoid (exact for
/// trigonometric polynomials of degree < n) on [a, b]. Trapezoid nodes start
/// at a and exclude b.
QuadratureRule quadrature_rule(QuadratureKind kind, int n, double a, double b);

}  // namespace modalstab::special
