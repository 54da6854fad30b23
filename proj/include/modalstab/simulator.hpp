#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalstab/controller.hpp"
#include "modalstab/spectral_basis.hpp"

namespace modalstab {

/// Galerkin projection of the boundary-controlled heat equation,
///   du_n/dt = mu_n u_n - <v, T_n phi_n>,
/// under v = sum_j (F U)_j T_n(phi_j). The generator is
/// diag(mu) - beta F acting on the first N coordinates, where
/// beta(n, j) = <T_n phi_j, T_n phi_n>.
struct ClosedLoopSystem {
  Eigen::VectorXd mu;        // N_sim
  Eigen::MatrixXd beta;      // N_sim x N
  Eigen::MatrixXd feedback;  // N x N (zero for the open loop)
  Eigen::MatrixXd coupling;  // beta * feedback, N_sim x N

  int size() const { return static_cast<int>(mu.size()); }
  int unstable() const { return static_cast<int>(feedback.rows()); }

  Eigen::MatrixXd generator() const;
  Eigen::MatrixXd leading_block() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  /// Boundary data coefficients F U against the trace family.
  Eigen::VectorXd boundary_coeffs(const Eigen::VectorXd& u) const;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  Eigen::MatrixXd states;    // N_sim x samples
  Eigen::MatrixXd boundary;  // N x samples
  bool truncated = false;    // overflow cut the run short

  int samples() const { return static_cast<int>(times.size()); }
  Eigen::MatrixXd unstable_states() const { return states.topRows(boundary.rows()); }
};

enum class Integrator { expm_step, rk4 };

Integrator integrator_from_string(const std::string& name);
std::string to_string(Integrator integrator);

/// Extended Gram block beta for a table (closed form, N_sim x N).
Eigen::MatrixXd extended_gram(const ModeTable& table);

ClosedLoopSystem assemble_closed_loop(const ModeTable& table, const GainSet& gains);

ClosedLoopSystem assemble_open_loop(const ModeTable& table);

/// Samples at t_k = k dt for k = 0..round(T/dt). States above 1e12 in
/// magnitude or non-finite end the run with `truncated` set.
Trajectory integrate(const ClosedLoopSystem& system, const Eigen::VectorXd& u0, double dt,
                     double horizon, Integrator method = Integrator::expm_step);

/// Uncontrolled evolution u_n(t) = u_n(0) exp(mu_n t).
Trajectory open_loop(const ModeTable& table, const Eigen::VectorXd& u0, double dt, double horizon);

struct ReducedFit {
  Eigen::MatrixXd generator;
  double residual = 0.0;          // relative least-squares residual
  double distance_direct = 0.0;   // ||G - (2 A_o - S)||_2
  double distance_weighted = 0.0; // ||G - (-S)||_2
};

/// Least-squares generator G with (U_{k+1} - U_{k-1}) / 2dt ~ G U_k.
ReducedFit reduced_dynamics_fit(const Trajectory& trajectory, const GainSet& gains);

/// Joint fit over several trajectories of the same system. Repeated
/// eigenvalues keep a single trajectory inside a proper invariant subspace,
/// so identifying G needs as many runs as the largest multiplicity.
ReducedFit reduced_dynamics_fit(std::span<const Trajectory> trajectories, const GainSet& gains);

ReducedFit reduced_dynamics_fit(std::span<const Eigen::MatrixXd> blocks, double dt);

/// Fits G from the unstable block of a trajectory without comparing to a gain set.
ReducedFit reduced_dynamics_fit(const Eigen::MatrixXd& U, double dt);

/// Documented 64-bit linear congruential generator (Knuth MMIX constants):
/// state <- 6364136223846793005 * state + 1442695040888963407 (mod 2^64);
/// uniform() = (state >> 11) * 2^-53 after each step.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Cubic polynomial in 2 or 3 variables, coefficients in graded-lexicographic
/// monomial order: degree 0, then degree 1 (x, y[, z]), and so on, with the
/// exponent of x descending inside each degree.
struct CubicPolynomial {
  int dimension = 2;
  std::vector<double> coeffs;

  static int term_count(int dimension) { return dimension == 2 ? 10 : 20; }
  static CubicPolynomial random(int dimension, std::uint64_t seed);
  static CubicPolynomial constant(int dimension, double value);
  double operator()(const Point& p) const;
};

/// Coefficients of (R^2 - |x|^2) p(x) on the table's modes.
Eigen::VectorXd project_initial_condition(const ModeTable& table, const CubicPolynomial& p,
                                          int refine = 1);

}  // namespace modalstab
