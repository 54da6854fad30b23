#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalstab/simulator.hpp"
#include "modalstab/spectral_basis.hpp"

namespace modalstab {

enum class RunMode { closed_loop, open_loop };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

/// Initial polynomial p in u0 = (R^2 - |x|^2) p(x).
enum class InitialKind { random, zero, constant };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Flat run description. Text form, one `key = value` per line, `#` starts a
/// comment, blank lines ignored:
///
///   domain.shape         disk | ball
///   domain.radius        > 0
///   lambda               real
///   gammas               auto | comma-separated increasing positive reals
///   gains.target_margin  < 0, used when gammas = auto
///   n_sim                >= number of nonnegative eigenvalues
///   dt, horizon          dt > 0, horizon >= dt
///   grid                 points per axis, >= 2
///   seed                 unsigned 64-bit integer
///   mode                 closed_loop | open_loop
///   integrator           expm_step | rk4
///   output_dir           path
///   fit.start, fit.end   decay-fit window
///   initial              random | zero | constant
///   initial.value        value of the constant polynomial
///   quadrature.refine    >= 1
///
/// Unknown keys are rejected.
struct RunConfig {
  Shape shape = Shape::disk;
  double radius = 2.0;
  double lambda = 6.61;
  bool gammas_auto = true;
  std::vector<double> gammas;  // explicit list when gammas_auto is false
  double target_margin = -0.5;
  int n_sim = 300;
  double dt = 0.05;
  double horizon = 4.0;
  int grid = 50;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::closed_loop;
  Integrator integrator = Integrator::expm_step;
  std::string output_dir = "out";
  double fit_start = 0.5;
  double fit_end = 3.5;
  InitialKind initial = InitialKind::random;
  double initial_value = 1.0;
  int quadrature_refine = 1;

  Domain domain() const { return make_domain(shape, radius); }
  /// Explicit gammas, or the shape's base list when gammas_auto is set.
  std::vector<double> base_gammas() const;
  /// Range and consistency checks that do not need the spectrum.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Reference gains for the two standard configurations.
std::vector<double> default_gammas(Shape shape);

RunConfig default_config(Shape shape);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Sets one key from its text value; throws ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace modalstab
