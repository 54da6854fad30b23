#include "modalstab/lifting.hpp"

#include <cmath>

#include "modalstab/errors.hpp"
#include "modalstab/io.hpp"
#include "modalstab/simulator.hpp"

namespace modalstab {

LiftingCoefficients lifting_coefficients(double gamma, const Eigen::VectorXd& boundary_coeffs,
                                         const Eigen::MatrixXd& beta, const ModeTable& table) {
  if (beta.rows() != table.size() || beta.cols() != boundary_coeffs.size()) {
    throw ConsistencyError("boundary Gram block does not match the mode table");
  }
  const int unstable = table.unstable_count();
  const Eigen::VectorXd rhs = beta * boundary_coeffs;  // <f, T_n phi_n>
  LiftingCoefficients out{gamma, Eigen::VectorXd(table.size())};
  for (int n = 0; n < table.size(); ++n) {
    const double mu = table[n].mu;
    const double denom = n < unstable ? gamma - mu : gamma + mu;
    if (std::fabs(denom) <= kResonanceTol) {
      throw ResonanceError("gamma = " + format_double(gamma) + " resonates with mode " +
                               std::to_string(n + 1) + " (mu = " + format_double(mu) + ")",
                           n + 1);
    }
    out.d[n] = rhs[n] / denom;
  }
  return out;
}

LiftingCoefficients lifting_coefficients(double gamma, const BoundaryFunction& f,
                                         const ModeTable& table) {
  return lifting_coefficients(gamma, f.coeffs, extended_gram(table), table);
}

LiftingCoefficients xi_coefficients(const GainSet& gains, const ModeTable& table,
                                    const Eigen::MatrixXd& beta, const Eigen::VectorXd& U,
                                    int component) {
  if (component < 0 || component >= gains.size()) {
    throw ConsistencyError("lifting component " + std::to_string(component) + " out of range");
  }
  if (gains.size() != table.unstable_count() || U.size() != gains.size()) {
    throw ConsistencyError("gain set was not synthesized over this mode table");
  }
  const Eigen::VectorXd c = gains.component_map(component) * U;
  return lifting_coefficients(gains.gammas[component], c, beta, table);
}

LiftingCoefficients xi_coefficients(const GainSet& gains, const ModeTable& table,
                                    const Eigen::VectorXd& U, int component) {
  return xi_coefficients(gains, table, extended_gram(table), U, component);
}

double lifting_h2_surrogate(const LiftingCoefficients& coeffs, const ModeTable& table) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.d.size(); ++n) {
    const double mu = table[n].mu;
    acc += (1.0 + mu * mu) * coeffs.d[n] * coeffs.d[n];
  }
  return std::sqrt(acc);
}

double lifting_h2_full(const LiftingCoefficients& coeffs, const ModeTable& table) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.d.size(); ++n) {
    const double k = table[n].kappa;
    acc += (1.0 + k + k * k) * coeffs.d[n] * coeffs.d[n];
  }
  return std::sqrt(acc);
}

double lifting_h2_green(const LiftingCoefficients& coeffs, const Eigen::VectorXd& boundary_coeffs,
                        const Eigen::MatrixXd& beta, const ModeTable& table) {
  const Eigen::VectorXd flux = beta * boundary_coeffs;
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.d.size(); ++n) {
    const double lap = table[n].kappa * coeffs.d[n] + flux[n];
    acc += coeffs.d[n] * coeffs.d[n] + lap * lap;
  }
  return std::sqrt(acc);
}

double commutation_check(const GainSet& gains, const ModeTable& table, const Trajectory& trajectory,
                         int component, double h) {
  const int samples = trajectory.samples();
  if (samples < 3) throw InsufficientDataError("commutation check needs at least 3 samples");
  if (!(h > 0.0) || trajectory.dt <= 0.0) throw DomainError("time increment must be positive");
  const int stride = std::max(1, static_cast<int>(std::lround(h / trajectory.dt)));
  if (samples < 2 * stride + 1) {
    throw InsufficientDataError("trajectory too short for the requested increment");
  }
  const double span = 2.0 * stride * trajectory.dt;
  const Eigen::MatrixXd beta = extended_gram(table);
  const Eigen::MatrixXd U = trajectory.unstable_states();
  const Eigen::MatrixXd map = gains.component_map(component);
  const double gamma = gains.gammas[component];

  double worst = 0.0;
  for (int k = stride; k + stride < samples; ++k) {
    const auto ahead = xi_coefficients(gains, table, beta, U.col(k + stride), component);
    const auto behind = xi_coefficients(gains, table, beta, U.col(k - stride), component);
    const Eigen::VectorXd lhs = (ahead.d - behind.d) / span;
    const Eigen::VectorXd dv = map * (U.col(k + stride) - U.col(k - stride)) / span;
    const Eigen::VectorXd rhs = lifting_coefficients(gamma, dv, beta, table).d;
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace modalstab
