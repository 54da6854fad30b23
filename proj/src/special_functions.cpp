#include "modalstab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "modalstab/errors.hpp"

namespace modalstab::special {
namespace {

using Real = long double;

constexpr double kPi = std::numbers::pi;

void check_order(int order, const char* what) {
  if (order < 0 || order > kMaxOrder) {
    throw UnsupportedOrderError(std::string(what) + " order " + std::to_string(order) +
                                " outside [0, " + std::to_string(kMaxOrder) + "]");
  }
}

void check_argument(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("Bessel argument must be finite and nonnegative, got " + std::to_string(x));
  }
}

// Starting index for the backward recurrence; J_n(x) is negligible beyond it.
int miller_start(int order, double x) {
  const double top = std::max<double>(order, x);
  int start = static_cast<int>(top + 40.0 + 10.0 * std::cbrt(top));
  return start + (start & 1);
}

Real cyl_series(int order, Real x) {
  const Real half = x / 2;
  Real term = 1;
  for (int i = 1; i <= order; ++i) term *= half / i;
  Real sum = term;
  const Real q = -half * half;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<Real>(k) * (k + order));
    sum += term;
    if (k > half && std::fabs(term) <= 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

Real cyl_miller(int order, Real x) {
  const int start = miller_start(order, static_cast<double>(x));
  Real next = 0;       // J_{n+1}
  Real cur = 1e-30L;   // J_n
  Real kept = 0;
  Real norm = 0;
  for (int n = start; n >= 1; --n) {
    const Real prev = (2 * n / x) * cur - next;
    next = cur;
    cur = prev;  // now J_{n-1}
    if (n - 1 == order) kept = cur;
    if (n - 1 > 0 && ((n - 1) % 2 == 0)) norm += 2 * cur;
    if (std::fabs(cur) > 1e300L) {
      constexpr Real s = 1e-300L;
      cur *= s;
      next *= s;
      kept *= s;
      norm *= s;
    }
  }
  norm += cur;  // J_0
  return kept / norm;
}

// Series terms grow by at most (x/2)^2 / (order + 1) at first, so the
// alternating sum stays well conditioned while that ratio is small.
bool series_regime(int order, Real x) { return x <= 8 || x * x / 4 <= 2 * (order + 1); }

Real cyl_j(int order, Real x) {
  if (x == 0) return order == 0 ? 1 : 0;
  if (series_regime(order, x)) return cyl_series(order, x);
  return cyl_miller(order, x);
}

Real sph_series(int degree, Real x) {
  Real term = 1;
  for (int i = 1; i <= degree; ++i) term *= x / (2 * i + 1);
  Real sum = term;
  const Real q = -x * x / 2;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<Real>(k) * (2 * degree + 2 * k + 1));
    sum += term;
    if (k > x && std::fabs(term) <= 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

Real sph_miller(int degree, Real x) {
  const int start = miller_start(degree, static_cast<double>(x));
  Real next = 0;
  Real cur = 1e-30L;
  Real kept = 0;
  Real s1 = 0;
  for (int n = start; n >= 1; --n) {
    const Real prev = ((2 * n + 1) / x) * cur - next;
    next = cur;
    cur = prev;
    if (n - 1 == degree) kept = cur;
    if (n - 1 == 1) s1 = cur;
    if (std::fabs(cur) > 1e300L) {
      constexpr Real s = 1e-300L;
      cur *= s;
      next *= s;
      kept *= s;
      s1 *= s;
    }
  }
  const Real j0 = std::sin(x) / x;
  const Real j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (std::fabs(j0) >= std::fabs(j1)) return kept * (j0 / cur);
  return kept * (j1 / s1);
}

Real sph_j(int degree, Real x) {
  if (x == 0) return degree == 0 ? 1 : 0;
  if (series_regime(degree, x)) return sph_series(degree, x);
  return sph_miller(degree, x);
}

double cyl_derivative(int order, double x) {
  if (order == 0) return -static_cast<double>(cyl_j(1, x));
  return static_cast<double>((cyl_j(order - 1, x) - cyl_j(order + 1, x)) / 2);
}

double sph_derivative(int degree, double x) {
  if (degree == 0) return -static_cast<double>(sph_j(1, x));
  const Real l = degree;
  return static_cast<double>((l * sph_j(degree - 1, x) - (l + 1) * sph_j(degree + 1, x)) /
                             (2 * l + 1));
}

// McMahon's large-zero expansion for the k-th zero of J_nu.
double mcmahon(double nu, int k) {
  const double beta = (k + nu / 2.0 - 0.25) * kPi;
  const double mu = 4.0 * nu * nu;
  const double e = 8.0 * beta;
  return beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
}

struct ZeroFinder {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double nu;     // equivalent cylindrical order, for the McMahon guess
  double start;  // f has no zero in (0, start]

  // Safeguarded Newton inside [a, b], f(a) f(b) < 0.
  double refine(double a, double b, int k) const {
    double fa = f(a);
    double x = mcmahon(nu, k);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double fx = f(x);
      if (fx == 0.0) return x;
      if ((fx < 0) == (fa < 0)) {
        a = x;
        fa = fx;
      } else {
        b = x;
      }
      const double d = df(x);
      double xn = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
      if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
      const double step = std::fabs(xn - x);
      x = xn;
      if (step <= 4e-16 * x || (b - a) <= 4e-16 * x) break;
    }
    return x;
  }

  // Scan with a step well below the minimal zero spacing, stopping after
  // `count` zeros or past `limit`.
  std::vector<double> scan(int count, double limit) const {
    constexpr double kStep = 0.5;
    std::vector<double> zeros;
    double a = start;
    double fa = f(a);
    while (static_cast<int>(zeros.size()) < count && a < limit) {
      const double b = a + kStep;
      const double fb = f(b);
      if (fb == 0.0) {
        zeros.push_back(b);
        a = b + 1e-9;
        fa = f(a);
        continue;
      }
      if ((fa < 0) != (fb < 0)) {
        zeros.push_back(refine(a, b, static_cast<int>(zeros.size()) + 1));
      }
      a = b;
      fa = fb;
    }
    if (!zeros.empty() && zeros.back() >= limit) zeros.pop_back();
    return zeros;
  }
};

ZeroFinder cyl_finder(int order) {
  return ZeroFinder{[order](double x) { return static_cast<double>(cyl_j(order, x)); },
                    [order](double x) { return cyl_derivative(order, x); },
                    static_cast<double>(order), order == 0 ? 1e-3 : static_cast<double>(order)};
}

ZeroFinder sph_finder(int degree) {
  return ZeroFinder{[degree](double x) { return static_cast<double>(sph_j(degree, x)); },
                    [degree](double x) { return sph_derivative(degree, x); }, degree + 0.5,
                    degree == 0 ? 1e-3 : degree + 0.5};
}

void check_rank(int k) {
  if (k < 1) throw DomainError("zero rank must be >= 1, got " + std::to_string(k));
}

// Normalised associated Legendre values Pbar_l^m(cos theta), for fixed m and
// l = m..lmax. Includes sqrt((2l+1)/4pi (l-m)!/(l+m)!), no (-1)^m.
void legendre_column(int m, int lmax, double c, double s, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(lmax + 1), 0.0);
  double pmm = std::sqrt((2.0 * m + 1.0) / (4.0 * kPi));
  for (int i = 1; i <= m; ++i) pmm *= std::sqrt((2.0 * i - 1.0) / (2.0 * i)) * s;
  out[m] = pmm;
  if (m == lmax) return;
  out[m + 1] = std::sqrt(2.0 * m + 3.0) * c * pmm;
  for (int l = m + 2; l <= lmax; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
    const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m) /
                               (4.0 * (l - 1) * (l - 1) - 1.0));
    out[l] = a * (c * out[l - 1] - b * out[l - 2]);
  }
}

}  // namespace

double bessel_j(int order, double x) {
  check_order(order, "Bessel");
  check_argument(x);
  return static_cast<double>(cyl_j(order, x));
}

double bessel_j_derivative(int order, double x) {
  check_order(order, "Bessel");
  check_argument(x);
  return cyl_derivative(order, x);
}

double bessel_j_zero(int order, int k) {
  check_order(order, "Bessel");
  check_rank(k);
  return cyl_finder(order).scan(k, 1e300).back();
}

std::vector<double> bessel_j_zeros_below(int order, double limit) {
  check_order(order, "Bessel");
  return cyl_finder(order).scan(1 << 30, limit);
}

double spherical_bessel_j(int degree, double x) {
  check_order(degree, "spherical Bessel");
  check_argument(x);
  return static_cast<double>(sph_j(degree, x));
}

double spherical_bessel_j_derivative(int degree, double x) {
  check_order(degree, "spherical Bessel");
  check_argument(x);
  return sph_derivative(degree, x);
}

double spherical_bessel_zero(int degree, int k) {
  check_order(degree, "spherical Bessel");
  check_rank(k);
  return sph_finder(degree).scan(k, 1e300).back();
}

std::vector<double> spherical_bessel_zeros_below(int degree, double limit) {
  check_order(degree, "spherical Bessel");
  return sph_finder(degree).scan(1 << 30, limit);
}

double real_spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) {
    throw InvalidOrderError("spherical harmonic needs |m| <= l, got l=" + std::to_string(l) +
                            " m=" + std::to_string(m));
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("polar angle must lie in [0, pi]");
  }
  const int am = std::abs(m);
  std::vector<double> column;
  legendre_column(am, l, std::cos(theta), std::sin(theta), column);
  const double p = column[l];
  if (m == 0) return p;
  if (m > 0) return std::numbers::sqrt2 * p * std::cos(m * phi);
  return std::numbers::sqrt2 * p * std::sin(am * phi);
}

std::vector<double> real_spherical_harmonics(int lmax, double theta, double phi) {
  if (lmax < 0) throw InvalidOrderError("lmax must be nonnegative");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> out(static_cast<std::size_t>((lmax + 1) * (lmax + 1)));
  std::vector<double> column;
  for (int m = 0; m <= lmax; ++m) {
    legendre_column(m, lmax, c, s, column);
    const double cm = std::cos(m * phi);
    const double sm = std::sin(m * phi);
    for (int l = m; l <= lmax; ++l) {
      const std::size_t base = static_cast<std::size_t>(l * l + l);
      if (m == 0) {
        out[base] = column[l];
      } else {
        out[base + m] = std::numbers::sqrt2 * column[l] * cm;
        out[base - m] = std::numbers::sqrt2 * column[l] * sm;
      }
    }
  }
  return out;
}

QuadratureRule quadrature_rule(QuadratureKind kind, int n, double a, double b) {
  if (n < 1) throw DomainError("quadrature needs n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  if (kind == QuadratureKind::periodic_trapezoid) {
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      rule.nodes[i] = a + h * i;
      rule.weights[i] = h;
    }
    return rule;
  }

  // Newton on P_n from the Tricomi-type initial guesses; nodes come out
  // descending in x, so fill from the back.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1;
      Real p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    // Recompute derivative at the converged node.
    Real p0 = 1;
    Real p1 = x;
    for (int j = 2; j <= n; ++j) {
      const Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1;
    dp = n * (x * p1 - p0) / (x * x - 1);
    const double w = static_cast<double>(2 / ((1 - x * x) * dp * dp));
    const double xd = static_cast<double>(x);
    rule.nodes[n - 1 - i] = mid + half * xd;
    rule.weights[n - 1 - i] = half * w;
    rule.nodes[i] = mid - half * xd;
    rule.weights[i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

}  // namespace modalstab::special
