#pragma once

#include <Eigen/Dense>

#include "modalstab/controller.hpp"
#include "modalstab/spectral_basis.hpp"

namespace modalstab {

struct Trajectory;

/// Boundary data f = sum_j coeffs_j T_n(phi_j), j over the unstable modes.
struct BoundaryFunction {
  Eigen::VectorXd coeffs;
};

/// Modal coefficients d_n = <D_gamma(f), phi_n>, n = 1..N_sim.
struct LiftingCoefficients {
  double gamma = 0.0;
  Eigen::VectorXd d;
};

/// Absolute distance below which gamma counts as resonant.
inline constexpr double kResonanceTol = 1e-8;

/// Projects the lifting problem onto each eigenfunction with Green's identity:
/// (gamma - mu_n) d_n = <f, T_n phi_n> for unstable n and
/// (gamma + mu_n) d_n = <f, T_n phi_n> otherwise.
LiftingCoefficients lifting_coefficients(double gamma, const BoundaryFunction& f,
                                         const ModeTable& table);

/// Same, with the boundary Gram block beta (N_sim x N) supplied by the caller.
LiftingCoefficients lifting_coefficients(double gamma, const Eigen::VectorXd& boundary_coeffs,
                                         const Eigen::MatrixXd& beta, const ModeTable& table);

/// xi_i = D_{gamma_i}(v_i) for the unstable-mode state U (component i is 0-based).
LiftingCoefficients xi_coefficients(const GainSet& gains, const ModeTable& table,
                                    const Eigen::VectorXd& U, int component);

LiftingCoefficients xi_coefficients(const GainSet& gains, const ModeTable& table,
                                    const Eigen::MatrixXd& beta, const Eigen::VectorXd& U,
                                    int component);

/// sqrt(sum (1 + mu_n^2) d_n^2).
double lifting_h2_surrogate(const LiftingCoefficients& coeffs, const ModeTable& table);

/// sqrt(sum (1 + kappa_n + kappa_n^2) d_n^2).
double lifting_h2_full(const LiftingCoefficients& coeffs, const ModeTable& table);

/// H2 norm from the exact Laplacian projection of the lift,
/// <Delta D, phi_n> = -kappa_n d_n - <f, T_n phi_n>:
/// sqrt(sum d_n^2 + (kappa_n d_n + <f, T_n phi_n>)^2).
double lifting_h2_green(const LiftingCoefficients& coeffs, const Eigen::VectorXd& boundary_coeffs,
                        const Eigen::MatrixXd& beta, const ModeTable& table);

/// Max deviation between the time derivative of xi_i (central differences of
/// its coefficients) and the lift of the central-differenced boundary data.
/// `h` picks the differencing stride as round(h / dt) samples.
double commutation_check(const GainSet& gains, const ModeTable& table, const Trajectory& trajectory,
                         int component, double h);

}  // namespace modalstab
