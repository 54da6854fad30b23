#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modalstab {

enum class Shape { disk, ball };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

/// Disk {|x| < R} in R^2 or ball {|x| < R} in R^3.
struct Domain {
  Shape shape = Shape::disk;
  double radius = 2.0;

  int dimension() const { return shape == Shape::disk ? 2 : 3; }
};

/// Validates R > 0 and returns the domain.
Domain make_domain(Shape shape, double radius);

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class Parity { cos, sin };

/// One Dirichlet eigenpair of Delta + lambda.
///
/// Disk modes are c * J_m(alpha r / R) * Theta(theta) with Theta = 1/sqrt(2 pi)
/// for m = 0 and cos(m theta)/sqrt(pi) or sin(m theta)/sqrt(pi) otherwise.
/// Ball modes are c * j_l(alpha r / R) * Y_lm(theta, phi) with real harmonics.
/// `norm_const` is c; `trace_amp` is the outward normal derivative of the radial
/// part at r = R, so the normal trace equals trace_amp * angular factor.
struct EigenMode {
  int index = 0;    // 1-based rank in the table
  int angular = 0;  // m on the disk, l on the ball
  int azimuthal = 0;  // ball only: m in [-l, l]
  Parity parity = Parity::cos;  // disk only
  int k = 0;        // radial rank
  double alpha = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  double norm_const = 0.0;
  double trace_amp = 0.0;

  bool same_angular(const EigenMode& other) const {
    return angular == other.angular && azimuthal == other.azimuthal && parity == other.parity;
  }
};

struct SpectrumSummary {
  int unstable = 0;  // number of mu >= 0
  int n_sim = 0;
  std::vector<double> eigenvalues;
};

/// Immutable table of the leading N_sim eigenpairs, sorted by descending mu.
class ModeTable {
 public:
  static ModeTable enumerate(const Domain& domain, double lambda, int n_sim);

  const Domain& domain() const { return domain_; }
  double lambda() const { return lambda_; }
  std::span<const EigenMode> modes() const { return modes_; }
  std::span<const EigenMode> unstable_modes() const {
    return std::span<const EigenMode>(modes_).first(static_cast<std::size_t>(unstable_));
  }
  const EigenMode& operator[](std::size_t i) const { return modes_[i]; }
  int size() const { return static_cast<int>(modes_.size()); }
  int unstable_count() const { return unstable_; }
  SpectrumSummary summary() const;

  Eigen::VectorXd mu() const;
  Eigen::VectorXd kappa() const;

  /// Largest angular order (m or l) present.
  int max_angular() const;
  int max_radial_rank() const;

 private:
  ModeTable(Domain domain, double lambda, std::vector<EigenMode> modes);

  Domain domain_;
  double lambda_ = 0.0;
  std::vector<EigenMode> modes_;
  int unstable_ = 0;
};

/// Value of the L2-normalised eigenfunction at `point` (|point| <= R).
double eval_mode(const EigenMode& mode, const Domain& domain, const Point& point);

/// Outward normal derivative of the eigenfunction at a boundary point.
double normal_trace(const EigenMode& mode, const Domain& domain, const Point& point);

/// <T_n phi_a, T_n phi_b> over the boundary, from the closed form.
double boundary_inner(const EigenMode& a, const EigenMode& b, const Domain& domain);

/// Rectangular boundary Gram block [rows x cols].
Eigen::MatrixXd boundary_gram(std::span<const EigenMode> rows, std::span<const EigenMode> cols,
                              const Domain& domain);

using ScalarField = std::function<double(const Point&)>;

/// <f, phi_n> for every mode by tensor-product quadrature. `refine` multiplies
/// every quadrature size.
Eigen::VectorXd project_function(const ScalarField& f, std::span<const EigenMode> modes,
                                 const Domain& domain, int refine = 1);

/// Radial factor of the eigenfunction (without norm_const) at radius r.
double radial_factor(const EigenMode& mode, const Domain& domain, double r);

/// Angular factor at the direction of `point` (unit-normalised on the circle
/// or sphere).
double angular_factor(const EigenMode& mode, const Domain& domain, const Point& point);

/// Writes the mode table as CSV with 17 significant digits.
void write_mode_table_csv(const ModeTable& table, const std::string& path);

}  // namespace modalstab
