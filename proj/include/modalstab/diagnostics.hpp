#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalstab/controller.hpp"
#include "modalstab/simulator.hpp"
#include "modalstab/spectral_basis.hpp"

namespace modalstab {

/// sqrt(sum (1 + mu_n^2) u_n^2).
double h2_surrogate(const Eigen::VectorXd& coeffs, const ModeTable& table);

/// sqrt(sum (1 + kappa_n + kappa_n^2) u_n^2).
double h2_full(const Eigen::VectorXd& coeffs, const ModeTable& table);

/// ||Delta u||_2 from <Delta u, phi_n> = (mu_n - lambda) u_n - (beta v)_n.
double laplacian_l2(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& boundary_coeffs,
                    const Eigen::MatrixXd& beta, const ModeTable& table);

/// Reconstruction of modal states on the uniform grid
/// linspace(-R, R, resolution)^d restricted to the closed domain.
class GridEvaluator {
 public:
  GridEvaluator(const ModeTable& table, int resolution);

  int resolution() const { return resolution_; }
  Eigen::Index point_count() const { return basis_.rows(); }
  const std::vector<Point>& points() const { return points_; }

  /// Field values at every grid point.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& coeffs) const;
  double linf(const Eigen::VectorXd& coeffs) const;
  /// Max norm of every column of an N_sim x samples matrix.
  Eigen::VectorXd linf_series(const Eigen::MatrixXd& states) const;

 private:
  int resolution_;
  std::vector<Point> points_;
  Eigen::MatrixXd basis_;  // points x modes
};

double linf_on_grid(const Eigen::VectorXd& coeffs, const ModeTable& table, int resolution);

struct DecayFit {
  double amplitude = 0.0;  // Gamma hat
  double rate = 0.0;       // sigma hat, positive for decay
  double residual = 0.0;   // RMS of log deviations
};

/// Least-squares line through (t, log v) on [t_a, t_b].
DecayFit decay_rate_fit(std::span<const double> times, std::span<const double> values, double t_a,
                        double t_b);

/// Gagliardo-Nirenberg exponents: (1/2, 1/2) on the disk, (1/4, 3/4) on the ball.
std::pair<double, double> gn_exponents(Shape shape);

struct NormSeries {
  std::vector<double> times;
  std::vector<double> h2_surrogate;
  std::vector<double> h2_full;
  std::vector<double> linf;
  std::vector<double> laplacian_l2;
  std::vector<double> l2;
  std::vector<double> u_norm;
  std::vector<double> dudt_l2;            // central differences
  std::vector<double> dudt_generator;     // generator applied to the state
  std::vector<std::vector<double>> xi;    // per lifted component, h2 surrogate
};

/// Every norm series of a trajectory. `gains` may be null for the open loop.
NormSeries compute_norm_series(const Trajectory& trajectory, const ModeTable& table,
                               const ClosedLoopSystem& system, const GainSet* gains,
                               const GridEvaluator& grid);

/// sup_t ||u||_inf / (||u||_2 + ||u||_2^p ||Delta u||_2^q).
double gn_ratio(const NormSeries& norms, double p, double q);

double gn_ratio(const Trajectory& trajectory, const ModeTable& table,
                const ClosedLoopSystem& system, const GridEvaluator& grid, double p, double q);

struct ClaimResult {
  std::string metric;
  std::optional<DecayFit> fit;  // empty for degenerate (identically zero) series
  double envelope = 0.0;  // max over the window of value / (Gamma e^{-sigma t})
  bool pass = false;
};

struct ClaimsReport {
  std::vector<ClaimResult> claims;
  bool degenerate = false;
  bool all_pass = false;
};

inline constexpr double kDefaultWindowStart = 0.5;
inline constexpr double kDefaultWindowEnd = 3.5;
inline constexpr double kEnvelopeSlack = 0.05;

/// Fits every decay claim on the window. A claim passes when its fitted rate
/// is positive and the series stays under (1 + 0.05) Gamma e^{-sigma t} on the
/// window.
ClaimsReport verify_claims(const NormSeries& norms, double t_a = kDefaultWindowStart,
                           double t_b = kDefaultWindowEnd);

}  // namespace modalstab
