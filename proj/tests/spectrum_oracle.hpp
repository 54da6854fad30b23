#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "modalstab/spectral_basis.hpp"
#include "oracles.hpp"

namespace oracle {

using modalstab::Shape;

/// Oracle spectrum: every Dirichlet eigenvalue below (limit / R)^2 with its
/// multiplicity, from bisection zeros.
inline std::vector<double> kappas(Shape shape, double R, double limit) {
  std::vector<double> out;
  for (int order = 0; order < limit; ++order) {
    std::function<double(double)> f;
    if (shape == Shape::disk) {
      f = [order](double x) { return oracle::bessel_j(order, x); };
    } else {
      f = [order](double x) {
        return x <= 40 ? oracle::spherical_bessel_series(order, x) : std::sph_bessel(order, x);
      };
    }
    const int mult = shape == Shape::disk ? (order == 0 ? 1 : 2) : 2 * order + 1;
    double a = std::max(order, 1) * 0.9 + 0.05;
    double fa = f(a);
    for (double b = a + 0.01; b < limit; b += 0.01) {
      const double fb = f(b);
      if ((fa < 0) != (fb < 0)) {
        const double z = oracle::bisect(f, b - 0.01, b);
        for (int i = 0; i < mult; ++i) out.push_back((z / R) * (z / R));
      }
      fa = fb;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
