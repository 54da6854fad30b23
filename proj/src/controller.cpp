#include "modalstab/controller.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "modalstab/errors.hpp"
#include "modalstab/io.hpp"

namespace modalstab {
namespace {

constexpr double kCollisionTol = 1e-8;
constexpr double kCollisionNudge = 1e-6;
constexpr double kMaxCondition = 1e12;

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Eigen::MatrixXd GainSet::component_map(int i) const { return lifting_diag[i].asDiagonal() * A; }

Eigen::MatrixXd build_gram(std::span<const EigenMode> modes, const Domain& domain) {
  Eigen::MatrixXd b = boundary_gram(modes, modes, domain);
  return 0.5 * (b + b.transpose());
}

GainSet synthesize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& gram,
                   std::vector<double> gammas) {
  const int n = static_cast<int>(mu.size());
  if (gram.rows() != n || gram.cols() != n) {
    throw SynthesisError("Gram matrix is " + std::to_string(gram.rows()) + "x" +
                         std::to_string(gram.cols()) + " for " + std::to_string(n) + " modes");
  }
  if (static_cast<int>(gammas.size()) != n) {
    throw SynthesisError("need exactly " + std::to_string(n) + " gammas, got " +
                         std::to_string(gammas.size()));
  }
  for (int i = 0; i < n; ++i) {
    if (!(gammas[i] > 0.0) || !std::isfinite(gammas[i])) {
      throw SynthesisError("gamma_" + std::to_string(i + 1) + " must be positive and finite");
    }
    if (i > 0 && !(gammas[i] > gammas[i - 1])) {
      throw SynthesisError("gammas must be strictly increasing");
    }
  }

  GainSet g;
  for (int i = 0; i < n; ++i) {
    for (bool moved = true; moved;) {
      moved = false;
      for (int k = 0; k < n; ++k) {
        if (std::fabs(gammas[i] - mu[k]) <= kCollisionTol) {
          g.notes.push_back("gamma_" + std::to_string(i + 1) + " = " + format_double(gammas[i]) +
                            " collides with mu_" + std::to_string(k + 1) + "; nudged by +1e-6");
          gammas[i] += kCollisionNudge;
          moved = true;
        }
      }
    }
  }

  g.gammas = Eigen::Map<const Eigen::VectorXd>(gammas.data(), n);
  g.mu = mu;
  g.gram = gram;
  g.open_loop = mu.asDiagonal();
  if (n == 0) {
    g.A = g.feedback = g.weighted_sum = g.generator_weighted = g.generator_direct =
        Eigen::MatrixXd(0, 0);
    return g;
  }

  Eigen::MatrixXd sum_bi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd diag(n);
    for (int k = 0; k < n; ++k) diag[k] = 1.0 / (gammas[i] - mu[k]);
    g.lifting_diag.push_back(diag);
    g.weighted_gram.push_back(diag.asDiagonal() * gram * diag.asDiagonal());
    sum_bi += g.weighted_gram.back();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sum_bi);
  const auto& sv = svd.singularValues();
  g.condition_number = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(g.condition_number <= kMaxCondition)) {
    throw SynthesisError("sum of B_i is numerically singular (condition number " +
                         format_double(g.condition_number) +
                         "); try larger or more widely spaced gammas");
  }
  g.A = sum_bi.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));

  g.feedback = Eigen::MatrixXd::Zero(n, n);
  g.weighted_sum = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    g.feedback += g.lifting_diag[i].asDiagonal() * g.A;
    g.weighted_sum += gammas[i] * g.weighted_gram[i] * g.A;
  }
  g.generator_weighted = -g.weighted_sum;
  g.generator_direct = g.open_loop - gram * g.feedback;
  return g;
}

GainSet synthesize(const ModeTable& table, std::vector<double> gammas) {
  return synthesize(table.mu().head(table.unstable_count()),
                    build_gram(table.unstable_modes(), table.domain()), std::move(gammas));
}

double hurwitz_margin(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw NumericalError("hurwitz_margin needs a square matrix");
  if (m.size() == 0) return -std::numeric_limits<double>::infinity();
  if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es.eigenvalues().real().maxCoeff();
}

StabilityReport validate_gains(const GainSet& gains, double horizon, int samples) {
  StabilityReport r;
  r.margin_weighted = hurwitz_margin(gains.generator_weighted);
  r.margin_direct = hurwitz_margin(gains.generator_direct);
  r.hurwitz_weighted = r.margin_weighted < 0.0;
  r.hurwitz_direct = r.margin_direct < 0.0;
  if (gains.size() == 0) return r;

  r.sigma_hat = -0.95 * r.margin_direct;
  samples = std::max(samples, 2);
  const double step = horizon / (samples - 1);
  const Eigen::MatrixXd e1 = (gains.generator_direct * step).exp();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(gains.size(), gains.size());
  r.c1_hat = 1.0;
  for (int k = 1; k < samples; ++k) {
    e = e1 * e;
    const double t = step * k;
    r.c1_hat = std::max(r.c1_hat, spectral_norm(e) * std::exp(r.sigma_hat * t));
  }
  return r;
}

AutoScaleResult auto_scale_gains(const Eigen::VectorXd& mu, const Eigen::MatrixXd& gram,
                                 const std::vector<double>& gammas0, double target_margin) {
  if (!(target_margin < 0.0)) throw DomainError("target margin must be negative");
  AutoScaleResult out;
  std::string tried;
  for (int p = 0; p <= 10; ++p) {
    const double scale = std::ldexp(1.0, p);
    std::vector<double> g(gammas0);
    for (double& v : g) v *= scale;
    double margin = std::numeric_limits<double>::quiet_NaN();
    try {
      const GainSet gs = synthesize(mu, gram, g);
      margin = hurwitz_margin(gs.generator_direct);
      g.assign(gs.gammas.data(), gs.gammas.data() + gs.gammas.size());
    } catch (const SynthesisError&) {
    }
    out.margins.push_back(margin);
    tried += (tried.empty() ? "" : ", ") + format_double(scale) + " -> " + format_double(margin);
    if (margin <= target_margin) {
      out.gammas = std::move(g);
      out.scale = scale;
      return out;
    }
  }
  throw SynthesisError("no gain scale up to 1024 reaches direct margin " +
                       format_double(target_margin) + " (scale -> margin: " + tried + ")");
}

AutoScaleResult auto_scale_gains(const ModeTable& table, const std::vector<double>& gammas0,
                                 double target_margin) {
  return auto_scale_gains(table.mu().head(table.unstable_count()),
                          build_gram(table.unstable_modes(), table.domain()), gammas0,
                          target_margin);
}

double boundary_control_eval(const GainSet& gains, const Eigen::VectorXd& U,
                             std::span<const EigenMode> unstable, const Domain& domain,
                             const Point& point) {
  if (static_cast<int>(unstable.size()) != gains.size() || U.size() != gains.size()) {
    throw ConsistencyError("state, modes and gain set dimensions differ");
  }
  const double r = domain.shape == Shape::disk
                       ? std::hypot(point.x, point.y)
                       : std::sqrt(point.x * point.x + point.y * point.y + point.z * point.z);
  if (std::fabs(r - domain.radius) > 1e-9 * domain.radius) {
    throw DomainError("control value requested off the boundary");
  }
  const Eigen::VectorXd c = gains.feedback * U;
  double v = 0.0;
  for (int j = 0; j < gains.size(); ++j) v += c[j] * normal_trace(unstable[j], domain, point);
  return v;
}

}  // namespace modalstab
