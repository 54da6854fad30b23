#include "modalstab/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "modalstab/errors.hpp"
#include "modalstab/io.hpp"
#include "modalstab/special_functions.hpp"

namespace modalstab {
namespace {

constexpr double kPi = std::numbers::pi;

// Highest angular order admitted in a table; the normalisation needs one
// order above it.
constexpr int kMaxTableOrder = special::kMaxOrder - 1;

struct Family {
  int angular;
  int k;
  double alpha;
};

std::vector<double> zeros_below(Shape shape, int order, double limit) {
  return shape == Shape::disk ? special::bessel_j_zeros_below(order, limit)
                              : special::spherical_bessel_zeros_below(order, limit);
}

int multiplicity(Shape shape, int order) {
  if (shape == Shape::disk) return order == 0 ? 1 : 2;
  return 2 * order + 1;
}

// Weyl-law estimate of the alpha cutoff that holds n_sim modes.
double initial_limit(Shape shape, int n_sim) {
  if (shape == Shape::disk) return 2.0 * std::sqrt(static_cast<double>(n_sim)) + 5.0;
  return std::cbrt(4.5 * kPi * n_sim) + 5.0;
}

double radial_value(Shape shape, int order, double x) {
  return shape == Shape::disk ? special::bessel_j(order, x) : special::spherical_bessel_j(order, x);
}

double radial_derivative(Shape shape, int order, double x) {
  return shape == Shape::disk ? special::bessel_j_derivative(order, x)
                              : special::spherical_bessel_j_derivative(order, x);
}

double norm(const Point& p, const Domain& domain) {
  if (domain.shape == Shape::disk) return std::hypot(p.x, p.y);
  return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
}

double disk_angular(const EigenMode& mode, double theta) {
  if (mode.angular == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const double s = 1.0 / std::sqrt(kPi);
  return mode.parity == Parity::cos ? s * std::cos(mode.angular * theta)
                                    : s * std::sin(mode.angular * theta);
}

void fill_constants(EigenMode& mode, const Domain& domain) {
  const double R = domain.radius;
  if (domain.shape == Shape::disk) {
    mode.norm_const = std::numbers::sqrt2 / (R * std::fabs(special::bessel_j(mode.angular + 1, mode.alpha)));
  } else {
    mode.norm_const = std::sqrt(2.0 / (R * R * R)) /
                      std::fabs(special::spherical_bessel_j(mode.angular + 1, mode.alpha));
  }
  mode.trace_amp =
      mode.norm_const * (mode.alpha / R) * radial_derivative(domain.shape, mode.angular, mode.alpha);
}

}  // namespace

std::string to_string(Shape shape) { return shape == Shape::disk ? "disk" : "ball"; }

Shape shape_from_string(const std::string& name) {
  if (name == "disk") return Shape::disk;
  if (name == "ball") return Shape::ball;
  throw DomainError("unknown domain shape '" + name + "' (expected disk or ball)");
}

Domain make_domain(Shape shape, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("domain radius must be positive");
  }
  return Domain{shape, radius};
}

ModeTable::ModeTable(Domain domain, double lambda, std::vector<EigenMode> modes)
    : domain_(domain), lambda_(lambda), modes_(std::move(modes)) {
  unstable_ = static_cast<int>(
      std::count_if(modes_.begin(), modes_.end(), [](const EigenMode& m) { return m.mu >= 0.0; }));
}

ModeTable ModeTable::enumerate(const Domain& domain, double lambda, int n_sim) {
  if (n_sim < 1) throw DomainError("n_sim must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
  const Domain checked = make_domain(domain.shape, domain.radius);
  const double R = checked.radius;

  double limit = initial_limit(checked.shape, n_sim);
  std::vector<Family> families;
  for (;;) {
    families.clear();
    long count = 0;
    for (int order = 0; order <= kMaxTableOrder && order < limit; ++order) {
      const auto zs = zeros_below(checked.shape, order, limit);
      for (std::size_t k = 0; k < zs.size(); ++k) {
        families.push_back({order, static_cast<int>(k) + 1, zs[k]});
        count += multiplicity(checked.shape, order);
      }
    }
    if (count >= n_sim) break;
    if (limit > kMaxTableOrder + 2) {
      throw CapacityError("n_sim = " + std::to_string(n_sim) +
                          " needs angular orders above " + std::to_string(kMaxTableOrder));
    }
    limit *= 1.25;
  }

  std::vector<EigenMode> modes;
  for (const Family& f : families) {
    EigenMode base;
    base.angular = f.angular;
    base.k = f.k;
    base.alpha = f.alpha;
    base.kappa = (f.alpha / R) * (f.alpha / R);
    base.mu = lambda - base.kappa;
    fill_constants(base, checked);
    if (checked.shape == Shape::disk) {
      modes.push_back(base);
      if (f.angular > 0) {
        base.parity = Parity::sin;
        modes.push_back(base);
      }
    } else {
      for (int m = -f.angular; m <= f.angular; ++m) {
        base.azimuthal = m;
        modes.push_back(base);
      }
    }
  }

  std::sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
    if (a.mu != b.mu) return a.mu > b.mu;
    if (a.angular != b.angular) return a.angular < b.angular;
    if (a.parity != b.parity) return a.parity == Parity::cos;
    if (a.azimuthal != b.azimuthal) return a.azimuthal < b.azimuthal;
    return a.k < b.k;
  });
  modes.resize(static_cast<std::size_t>(n_sim));

  // Any excluded order above the cap has its first zero beyond cap + 1.
  if (modes.back().alpha >= kMaxTableOrder + 1) {
    throw CapacityError("n_sim = " + std::to_string(n_sim) +
                        " reaches the special-function order cap");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) modes[i].index = static_cast<int>(i) + 1;
  return ModeTable(checked, lambda, std::move(modes));
}

SpectrumSummary ModeTable::summary() const {
  SpectrumSummary s;
  s.unstable = unstable_;
  s.n_sim = size();
  s.eigenvalues.reserve(modes_.size());
  for (const auto& m : modes_) s.eigenvalues.push_back(m.mu);
  return s;
}

Eigen::VectorXd ModeTable::mu() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = modes_[i].mu;
  return v;
}

Eigen::VectorXd ModeTable::kappa() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = modes_[i].kappa;
  return v;
}

int ModeTable::max_angular() const {
  int out = 0;
  for (const auto& m : modes_) out = std::max(out, m.angular);
  return out;
}

int ModeTable::max_radial_rank() const {
  int out = 0;
  for (const auto& m : modes_) out = std::max(out, m.k);
  return out;
}

double radial_factor(const EigenMode& mode, const Domain& domain, double r) {
  return radial_value(domain.shape, mode.angular, mode.alpha * std::min(r, domain.radius) / domain.radius);
}

double angular_factor(const EigenMode& mode, const Domain& domain, const Point& p) {
  if (domain.shape == Shape::disk) return disk_angular(mode, std::atan2(p.y, p.x));
  const double r = norm(p, domain);
  const double theta = r > 0.0 ? std::acos(std::clamp(p.z / r, -1.0, 1.0)) : 0.0;
  return special::real_spherical_harmonic(mode.angular, mode.azimuthal, theta, std::atan2(p.y, p.x));
}

double eval_mode(const EigenMode& mode, const Domain& domain, const Point& point) {
  const double r = norm(point, domain);
  if (r > domain.radius * (1.0 + 1e-12)) {
    throw DomainError("point lies outside the closed domain");
  }
  return mode.norm_const * radial_factor(mode, domain, r) * angular_factor(mode, domain, point);
}

double normal_trace(const EigenMode& mode, const Domain& domain, const Point& point) {
  const double r = norm(point, domain);
  if (std::fabs(r - domain.radius) > 1e-9 * domain.radius) {
    throw DomainError("normal trace requested off the boundary");
  }
  return mode.trace_amp * angular_factor(mode, domain, point);
}

double boundary_inner(const EigenMode& a, const EigenMode& b, const Domain& domain) {
  if (!a.same_angular(b)) return 0.0;
  const double measure = domain.shape == Shape::disk ? domain.radius : domain.radius * domain.radius;
  return a.trace_amp * b.trace_amp * measure;
}

Eigen::MatrixXd boundary_gram(std::span<const EigenMode> rows, std::span<const EigenMode> cols,
                              const Domain& domain) {
  Eigen::MatrixXd g(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) g(i, j) = boundary_inner(rows[i], cols[j], domain);
  }
  return g;
}

Eigen::VectorXd project_function(const ScalarField& f, std::span<const EigenMode> modes,
                                 const Domain& domain, int refine) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes.size()));
  if (modes.empty()) return out;
  refine = std::max(refine, 1);
  int kmax = 0;
  int amax = 0;
  for (const auto& m : modes) {
    kmax = std::max(kmax, m.k);
    amax = std::max(amax, m.angular);
  }
  const double R = domain.radius;
  const int n_r = (2 * kmax * 4 + 32) * refine;
  const int n_a = (4 * amax + 16) * refine;
  const auto radial = special::quadrature_rule(special::QuadratureKind::gauss_legendre, n_r, 0.0, R);

  if (domain.shape == Shape::disk) {
    const auto ang = special::quadrature_rule(special::QuadratureKind::periodic_trapezoid, n_a, 0.0, 2.0 * kPi);
    // moments(i, col): col 0 -> m = 0, 2m-1 -> cos, 2m -> sin
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(n_r, 2 * amax + 1);
    for (int i = 0; i < n_r; ++i) {
      const double r = radial.nodes[i];
      for (int j = 0; j < n_a; ++j) {
        const double th = ang.nodes[j];
        const double v = ang.weights[j] * f(Point{r * std::cos(th), r * std::sin(th), 0.0});
        moments(i, 0) += v / std::sqrt(2.0 * kPi);
        for (int m = 1; m <= amax; ++m) {
          moments(i, 2 * m - 1) += v * std::cos(m * th) / std::sqrt(kPi);
          moments(i, 2 * m) += v * std::sin(m * th) / std::sqrt(kPi);
        }
      }
    }
    for (std::size_t n = 0; n < modes.size(); ++n) {
      const auto& mode = modes[n];
      const int col = mode.angular == 0 ? 0 : 2 * mode.angular - (mode.parity == Parity::cos ? 1 : 0);
      double acc = 0.0;
      for (int i = 0; i < n_r; ++i) {
        const double r = radial.nodes[i];
        acc += radial.weights[i] * r * radial_factor(mode, domain, r) * moments(i, col);
      }
      out[static_cast<Eigen::Index>(n)] = mode.norm_const * acc;
    }
    return out;
  }

  const auto polar = special::quadrature_rule(special::QuadratureKind::gauss_legendre, n_a, -1.0, 1.0);
  const auto azim = special::quadrature_rule(special::QuadratureKind::periodic_trapezoid, n_a, 0.0, 2.0 * kPi);
  const int nh = (amax + 1) * (amax + 1);
  const int n_dir = n_a * n_a;
  Eigen::MatrixXd harmonics(n_dir, nh);
  std::vector<Point> dirs(n_dir);
  std::vector<double> dir_w(n_dir);
  for (int a = 0; a < n_a; ++a) {
    const double c = polar.nodes[a];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double theta = std::acos(c);
    for (int b = 0; b < n_a; ++b) {
      const int d = a * n_a + b;
      const double ph = azim.nodes[b];
      dirs[d] = Point{s * std::cos(ph), s * std::sin(ph), c};
      dir_w[d] = polar.weights[a] * azim.weights[b];
      const auto y = special::real_spherical_harmonics(amax, theta, ph);
      for (int h = 0; h < nh; ++h) harmonics(d, h) = y[h];
    }
  }
  Eigen::MatrixXd samples(n_r, n_dir);
  for (int i = 0; i < n_r; ++i) {
    const double r = radial.nodes[i];
    for (int d = 0; d < n_dir; ++d) {
      samples(i, d) = dir_w[d] * f(Point{r * dirs[d].x, r * dirs[d].y, r * dirs[d].z});
    }
  }
  const Eigen::MatrixXd moments = samples * harmonics;  // n_r x nh
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const auto& mode = modes[n];
    const int h = mode.angular * mode.angular + mode.angular + mode.azimuthal;
    double acc = 0.0;
    for (int i = 0; i < n_r; ++i) {
      const double r = radial.nodes[i];
      acc += radial.weights[i] * r * r * radial_factor(mode, domain, r) * moments(i, h);
    }
    out[static_cast<Eigen::Index>(n)] = mode.norm_const * acc;
  }
  return out;
}

void write_mode_table_csv(const ModeTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const bool disk = table.domain().shape == Shape::disk;
  os << (disk ? "n,m,parity,k" : "n,l,m,k") << ",alpha,kappa,mu,norm_const,trace_amp\n";
  for (const auto& m : table.modes()) {
    os << m.index << ',' << m.angular << ',';
    if (disk) {
      os << (m.parity == Parity::cos ? "cos" : "sin");
    } else {
      os << m.azimuthal;
    }
    os << ',' << m.k << ',' << format_double(m.alpha) << ',' << format_double(m.kappa) << ','
       << format_double(m.mu) << ',' << format_double(m.norm_const) << ','
       << format_double(m.trace_amp) << '\n';
  }
}

}  // namespace modalstab
