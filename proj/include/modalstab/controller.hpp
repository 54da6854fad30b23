#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalstab/spectral_basis.hpp"

namespace modalstab {

/// Every finite-dimensional object of the modal boundary controller.
///
/// With A_o = diag(mu_1..mu_N), M_i = diag(1/(gamma_i - mu_n)),
/// B_i = M_i B M_i and A = (sum_i B_i)^{-1}, the feedback is
/// v = sum_j (F U)_j T_n(phi_j) with F = sum_i M_i A.
struct GainSet {
  Eigen::VectorXd gammas;
  Eigen::VectorXd mu;          // mu_1..mu_N
  Eigen::MatrixXd gram;        // B
  std::vector<Eigen::VectorXd> lifting_diag;  // diagonal of each M_i
  std::vector<Eigen::MatrixXd> weighted_gram;  // B_i
  Eigen::MatrixXd A;
  Eigen::MatrixXd feedback;    // F = sum_i M_i A
  Eigen::MatrixXd weighted_sum;  // S = sum_i gamma_i B_i A
  Eigen::MatrixXd open_loop;     // A_o
  Eigen::MatrixXd generator_weighted;  // -S
  Eigen::MatrixXd generator_direct;    // A_o - B F, equals 2 A_o - S
  double condition_number = 1.0;
  std::vector<std::string> notes;  // collision nudges and similar events

  int size() const { return static_cast<int>(gammas.size()); }
  /// M_i A, the boundary coefficient map of the i-th lifted component.
  Eigen::MatrixXd component_map(int i) const;
};

struct StabilityReport {
  double margin_weighted = 0.0;  // max Re eig(-S)
  double margin_direct = 0.0;    // max Re eig(A_o - B F)
  bool hurwitz_weighted = false;
  bool hurwitz_direct = false;
  double c1_hat = 1.0;
  double sigma_hat = 0.0;
};

/// Gram matrix of the normal traces of `modes`.
Eigen::MatrixXd build_gram(std::span<const EigenMode> modes, const Domain& domain);

/// Synthesis from an explicit spectrum and Gram matrix.
GainSet synthesize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& gram,
                   std::vector<double> gammas);

/// Synthesis over the unstable modes of a table.
GainSet synthesize(const ModeTable& table, std::vector<double> gammas);

/// Largest real part of the spectrum; negative means Hurwitz.
double hurwitz_margin(const Eigen::MatrixXd& m);

/// Both margins plus empirical transient constants of the direct generator
/// sampled on [0, horizon].
StabilityReport validate_gains(const GainSet& gains, double horizon = 4.0, int samples = 401);

struct AutoScaleResult {
  std::vector<double> gammas;
  double scale = 1.0;
  std::vector<double> margins;  // margin_direct per tried scale
};

/// Smallest scale in {1, 2, 4, ..., 1024} whose direct margin reaches
/// `target_margin`.
AutoScaleResult auto_scale_gains(const Eigen::VectorXd& mu, const Eigen::MatrixXd& gram,
                                 const std::vector<double>& gammas0, double target_margin);

AutoScaleResult auto_scale_gains(const ModeTable& table, const std::vector<double>& gammas0,
                                 double target_margin);

/// Boundary control value v at a boundary point for unstable-mode state U.
double boundary_control_eval(const GainSet& gains, const Eigen::VectorXd& U,
                             std::span<const EigenMode> unstable, const Domain& domain,
                             const Point& point);

}  // namespace modalstab
