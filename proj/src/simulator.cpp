#include "modalstab/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "modalstab/errors.hpp"
#include "modalstab/special_functions.hpp"

namespace modalstab {
namespace {

constexpr double kOverflow = 1e12;

// Each RK4 substep keeps h * (spectral radius bound) at or below this.
constexpr double kRk4StepScale = 0.05;

bool overflowed(const Eigen::VectorXd& u) {
  return !u.allFinite() || u.cwiseAbs().maxCoeff() > kOverflow;
}

Trajectory make_trajectory(int n_sim, int n_unstable, double dt, int steps) {
  Trajectory t;
  t.dt = dt;
  t.states.resize(n_sim, steps + 1);
  t.boundary = Eigen::MatrixXd::Zero(n_unstable, steps + 1);
  t.times.reserve(static_cast<std::size_t>(steps) + 1);
  return t;
}

void finish(Trajectory& t, int kept) {
  t.states.conservativeResize(Eigen::NoChange, kept);
  t.boundary.conservativeResize(Eigen::NoChange, kept);
  t.times.resize(static_cast<std::size_t>(kept));
}

int step_count(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(horizon >= dt)) throw DomainError("horizon must be at least dt");
  return static_cast<int>(std::lround(horizon / dt));
}

double boundary_inner_quadrature(const EigenMode& a, const EigenMode& b, const Domain& domain) {
  using special::QuadratureKind;
  const int n = 4 * std::max(a.angular, b.angular) + 16;
  const double R = domain.radius;
  const double two_pi = 2.0 * 3.14159265358979323846;
  const auto az = special::quadrature_rule(QuadratureKind::periodic_trapezoid, n, 0.0, two_pi);
  double acc = 0.0;
  if (domain.shape == Shape::disk) {
    for (int j = 0; j < n; ++j) {
      const Point p{R * std::cos(az.nodes[j]), R * std::sin(az.nodes[j]), 0.0};
      acc += az.weights[j] * R * normal_trace(a, domain, p) * normal_trace(b, domain, p);
    }
    return acc;
  }
  const auto polar = special::quadrature_rule(QuadratureKind::gauss_legendre, n, -1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const double c = polar.nodes[i];
    const double s = std::sqrt(1.0 - c * c);
    for (int j = 0; j < n; ++j) {
      const Point p{R * s * std::cos(az.nodes[j]), R * s * std::sin(az.nodes[j]), R * c};
      acc += polar.weights[i] * az.weights[j] * R * R * normal_trace(a, domain, p) *
             normal_trace(b, domain, p);
    }
  }
  return acc;
}

// Quadrature spot check of roughly 5% of the closed-form beta entries.
void cross_check_beta(const ModeTable& table, const Eigen::MatrixXd& beta) {
  Lcg64 rng(0x5eedULL);
  const auto modes = table.modes();
  const auto total = beta.size();
  const auto checks = std::max<Eigen::Index>(1, total / 20);
  for (Eigen::Index c = 0; c < checks && total > 0; ++c) {
    const auto flat = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(total));
    const Eigen::Index i = flat % beta.rows();
    const Eigen::Index j = flat / beta.rows();
    const double q = boundary_inner_quadrature(modes[i], modes[j], table.domain());
    if (std::fabs(q - beta(i, j)) > 1e-9 * std::max(1.0, std::fabs(q))) {
      throw ConsistencyError("boundary Gram entry (" + std::to_string(i + 1) + ", " +
                             std::to_string(j + 1) + ") disagrees with quadrature");
    }
  }
}

}  // namespace

Eigen::MatrixXd ClosedLoopSystem::generator() const {
  Eigen::MatrixXd g = mu.asDiagonal();
  g.leftCols(unstable()) -= coupling;
  return g;
}

Eigen::MatrixXd ClosedLoopSystem::leading_block() const {
  const int n = unstable();
  Eigen::MatrixXd g = mu.head(n).asDiagonal();
  return g - coupling.topRows(n);
}

Eigen::VectorXd ClosedLoopSystem::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = mu.cwiseProduct(u);
  if (unstable() > 0) out.noalias() -= coupling * u.head(unstable());
  return out;
}

Eigen::VectorXd ClosedLoopSystem::boundary_coeffs(const Eigen::VectorXd& u) const {
  return feedback * u.head(unstable());
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "expm_step") return Integrator::expm_step;
  if (name == "rk4") return Integrator::rk4;
  throw DomainError("unknown integrator '" + name + "' (expected expm_step or rk4)");
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::expm_step ? "expm_step" : "rk4";
}

Eigen::MatrixXd extended_gram(const ModeTable& table) {
  return boundary_gram(table.modes(), table.unstable_modes(), table.domain());
}

ClosedLoopSystem assemble_closed_loop(const ModeTable& table, const GainSet& gains) {
  const int n = table.unstable_count();
  if (gains.size() != n) {
    throw ConsistencyError("gain set has " + std::to_string(gains.size()) +
                           " components but the table has " + std::to_string(n) +
                           " unstable modes");
  }
  for (int i = 0; i < n; ++i) {
    if (std::fabs(gains.mu[i] - table[i].mu) > 1e-12 * std::max(1.0, std::fabs(table[i].mu))) {
      throw ConsistencyError("gain set spectrum differs from the mode table at mode " +
                             std::to_string(i + 1));
    }
  }
  ClosedLoopSystem s;
  s.mu = table.mu();
  s.beta = extended_gram(table);
  cross_check_beta(table, s.beta);
  s.feedback = gains.feedback;
  s.coupling = s.beta * s.feedback;
  return s;
}

ClosedLoopSystem assemble_open_loop(const ModeTable& table) {
  const int n = table.unstable_count();
  ClosedLoopSystem s;
  s.mu = table.mu();
  s.beta = extended_gram(table);
  s.feedback = Eigen::MatrixXd::Zero(n, n);
  s.coupling = Eigen::MatrixXd::Zero(table.size(), n);
  return s;
}

Trajectory integrate(const ClosedLoopSystem& system, const Eigen::VectorXd& u0, double dt,
                     double horizon, Integrator method) {
  if (u0.size() != system.size()) throw ConsistencyError("initial state has the wrong length");
  const int steps = step_count(dt, horizon);
  Trajectory t = make_trajectory(system.size(), system.unstable(), dt, steps);
  t.states.col(0) = u0;
  t.boundary.col(0) = system.boundary_coeffs(u0);
  t.times.push_back(0.0);

  Eigen::MatrixXd propagator;
  int substeps = 1;
  double h = dt;
  if (method == Integrator::expm_step) {
    propagator = (system.generator() * dt).exp();
  } else {
    double rho = system.mu.cwiseAbs().maxCoeff();
    if (system.unstable() > 0) rho += system.coupling.cwiseAbs().rowwise().sum().maxCoeff();
    substeps = std::max(1, static_cast<int>(std::ceil(dt * rho / kRk4StepScale)));
    h = dt / substeps;
  }

  Eigen::VectorXd u = u0;
  int kept = 1;
  for (int k = 1; k <= steps; ++k) {
    if (method == Integrator::expm_step) {
      u = propagator * u;
    } else {
      for (int s = 0; s < substeps; ++s) {
        const Eigen::VectorXd k1 = system.apply(u);
        const Eigen::VectorXd k2 = system.apply(u + 0.5 * h * k1);
        const Eigen::VectorXd k3 = system.apply(u + 0.5 * h * k2);
        const Eigen::VectorXd k4 = system.apply(u + h * k3);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    if (overflowed(u)) {
      t.truncated = true;
      break;
    }
    t.states.col(k) = u;
    t.boundary.col(k) = system.boundary_coeffs(u);
    t.times.push_back(k * dt);
    kept = k + 1;
  }
  finish(t, kept);
  return t;
}

Trajectory open_loop(const ModeTable& table, const Eigen::VectorXd& u0, double dt, double horizon) {
  if (u0.size() != table.size()) throw ConsistencyError("initial state has the wrong length");
  const int steps = step_count(dt, horizon);
  Trajectory t = make_trajectory(table.size(), table.unstable_count(), dt, steps);
  const Eigen::VectorXd mu = table.mu();
  int kept = 0;
  for (int k = 0; k <= steps; ++k) {
    const double time = k * dt;
    const Eigen::VectorXd u = u0.cwiseProduct((mu * time).array().exp().matrix());
    if (overflowed(u)) {
      t.truncated = true;
      break;
    }
    t.states.col(k) = u;
    t.times.push_back(time);
    kept = k + 1;
  }
  finish(t, kept);
  return t;
}

ReducedFit reduced_dynamics_fit(std::span<const Eigen::MatrixXd> blocks, double dt) {
  if (blocks.empty()) throw InsufficientDataError("reduced fit needs at least one trajectory");
  const auto n = blocks.front().rows();
  Eigen::Index total = 0;
  double peak = 0.0;
  for (const auto& U : blocks) {
    if (U.rows() != n) throw ConsistencyError("trajectories differ in the unstable dimension");
    if (U.cols() < 10) throw InsufficientDataError("reduced fit needs at least 10 samples");
    total += U.cols() - 2;
    if (U.size() > 0) peak = std::max(peak, U.cwiseAbs().maxCoeff());
  }
  if (n == 0 || peak < 1e-12) {
    throw InsufficientDataError("insufficient excitation: unstable modes are identically ~0");
  }
  Eigen::MatrixXd X(n, total), Y(n, total);
  Eigen::Index at = 0;
  for (const auto& U : blocks) {
    const auto m = U.cols() - 2;
    X.middleCols(at, m) = U.middleCols(1, m);
    Y.middleCols(at, m) = (U.rightCols(m) - U.leftCols(m)) / (2.0 * dt);
    at += m;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.transpose());
  if (qr.rank() < n) throw InsufficientDataError("insufficient excitation: rank-deficient regression");
  ReducedFit fit;
  fit.generator = qr.solve(Y.transpose()).transpose();
  const double ynorm = Y.norm();
  fit.residual = ynorm > 0.0 ? (Y - fit.generator * X).norm() / ynorm : 0.0;
  return fit;
}

ReducedFit reduced_dynamics_fit(const Eigen::MatrixXd& U, double dt) {
  return reduced_dynamics_fit(std::span<const Eigen::MatrixXd>(&U, 1), dt);
}

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

ReducedFit reduced_dynamics_fit(std::span<const Trajectory> trajectories, const GainSet& gains) {
  std::vector<Eigen::MatrixXd> blocks;
  for (const auto& t : trajectories) {
    if (t.boundary.rows() != gains.size()) {
      throw ConsistencyError("trajectory and gain set disagree on the unstable dimension");
    }
    if (!blocks.empty() && t.dt != trajectories.front().dt) {
      throw ConsistencyError("trajectories use different time steps");
    }
    blocks.push_back(t.unstable_states());
  }
  if (blocks.empty()) throw InsufficientDataError("reduced fit needs at least one trajectory");
  ReducedFit fit = reduced_dynamics_fit(blocks, trajectories.front().dt);
  fit.distance_direct = spectral_norm(fit.generator - gains.generator_direct);
  fit.distance_weighted = spectral_norm(fit.generator - gains.generator_weighted);
  return fit;
}

ReducedFit reduced_dynamics_fit(const Trajectory& trajectory, const GainSet& gains) {
  return reduced_dynamics_fit(std::span<const Trajectory>(&trajectory, 1), gains);
}

std::uint64_t Lcg64::next() {
  state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
  return state_;
}

double Lcg64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

std::vector<std::array<int, 3>> cubic_exponents(int dimension) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= 3; ++d) {
    for (int a = d; a >= 0; --a) {
      if (dimension == 2) {
        out.push_back({a, d - a, 0});
        continue;
      }
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
    }
  }
  return out;
}

void check_dimension(int dimension) {
  if (dimension != 2 && dimension != 3) throw DomainError("polynomial dimension must be 2 or 3");
}

}  // namespace

CubicPolynomial CubicPolynomial::random(int dimension, std::uint64_t seed) {
  check_dimension(dimension);
  Lcg64 rng(seed);
  CubicPolynomial p{dimension, {}};
  for (int i = 0; i < term_count(dimension); ++i) p.coeffs.push_back(rng.uniform(-1.0, 1.0));
  return p;
}

CubicPolynomial CubicPolynomial::constant(int dimension, double value) {
  check_dimension(dimension);
  CubicPolynomial p{dimension, std::vector<double>(term_count(dimension), 0.0)};
  p.coeffs[0] = value;
  return p;
}

double CubicPolynomial::operator()(const Point& p) const {
  const auto exps = cubic_exponents(dimension);
  double acc = 0.0;
  for (std::size_t i = 0; i < exps.size() && i < coeffs.size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    acc += coeffs[i] * std::pow(p.x, exps[i][0]) * std::pow(p.y, exps[i][1]) *
           std::pow(p.z, exps[i][2]);
  }
  return acc;
}

Eigen::VectorXd project_initial_condition(const ModeTable& table, const CubicPolynomial& p,
                                          int refine) {
  const Domain& domain = table.domain();
  if (p.dimension != domain.dimension()) {
    throw ConsistencyError("polynomial dimension does not match the domain");
  }
  if (static_cast<int>(p.coeffs.size()) != CubicPolynomial::term_count(p.dimension)) {
    throw ConsistencyError("cubic polynomial needs " +
                           std::to_string(CubicPolynomial::term_count(p.dimension)) +
                           " coefficients");
  }
  const double r2 = domain.radius * domain.radius;
  const auto exps = cubic_exponents(p.dimension);
  auto field = [&](const Point& x) {
    double poly = 0.0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      poly += p.coeffs[i] * std::pow(x.x, exps[i][0]) * std::pow(x.y, exps[i][1]) *
              std::pow(x.z, exps[i][2]);
    }
    return (r2 - (x.x * x.x + x.y * x.y + x.z * x.z)) * poly;
  };
  return project_function(field, table.modes(), domain, refine);
}

}  // namespace modalstab
