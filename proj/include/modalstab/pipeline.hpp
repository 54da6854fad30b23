#pragma once

#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalstab/controller.hpp"
#include "modalstab/diagnostics.hpp"
#include "modalstab/run_config.hpp"
#include "modalstab/simulator.hpp"
#include "modalstab/spectral_basis.hpp"

namespace modalstab {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitBadInput = 2,
  kExitGainsNotValidated = 3,
  kExitSynthesisFailure = 4,
};

/// Maps a library error onto an exit code.
int exit_code_for(const std::exception& error);

/// Spectrum values reported in the literature for the standard configurations,
/// carried into spectrum.json for comparison.
std::vector<double> reference_mu(Shape shape);

/// Mode table for a config; rejects n_sim below the number of nonnegative
/// eigenvalues.
ModeTable build_table(const RunConfig& config);

/// Largest number of unstable modes sharing one eigenvalue.
int largest_multiplicity(const ModeTable& table);

struct GainsOutcome {
  GainSet gains;
  StabilityReport stability;
  std::string source;  // explicit | reference | auto-scaled
  double scale = 1.0;
  std::vector<double> tried_margins;
  bool validated = false;
  std::string message;
};

/// Synthesizes the configured gains. With gammas = auto the base list is
/// doubled until the direct margin reaches gains.target_margin.
GainsOutcome prepare_gains(const RunConfig& config, const ModeTable& table);

Eigen::VectorXd initial_coefficients(const RunConfig& config, const ModeTable& table);

struct SimulationResult {
  ModeTable table;
  std::optional<GainsOutcome> gains;  // empty in open loop
  ClosedLoopSystem system;
  Eigen::VectorXd u0;
  Trajectory trajectory;
  NormSeries norms;
  bool diverged = false;
};

/// Full run in memory. Closed loop requires validated gains
/// (GainValidationError otherwise).
SimulationResult simulate(const RunConfig& config);

struct VerificationResult {
  ClaimsReport claims;
  std::optional<ReducedFit> reduced_fit;
  std::string reduced_fit_note;
  std::optional<double> commutation_deviation;
  std::optional<double> gn_ratio;
  std::string gn_note;
  // max over the fit window of |laplacian_l2 - ||du/dt - lambda u|||
  double laplacian_consistency = 0.0;
  bool pass = false;
};

/// Claims on the main run; the reduced fit also uses one extra seeded run per
/// additional copy of a repeated unstable eigenvalue.
VerificationResult verify(const RunConfig& config, const SimulationResult& sim);

/// Writers for the artifacts of each command.
void write_spectrum_json(const RunConfig& config, const ModeTable& table, const std::string& path);
void write_gains_json(const RunConfig& config, const GainsOutcome& outcome, const std::string& path);
void write_trajectory_csv(const SimulationResult& sim, const std::string& path);
void write_norms_csv(const SimulationResult& sim, const std::string& path);
void write_summary_json(const RunConfig& config, const SimulationResult& sim,
                        const std::string& path);
void write_claims_json(const RunConfig& config, const SimulationResult& sim,
                       const VerificationResult& result, const std::string& path);

/// Commands: write into config.output_dir, report on `log`, return an exit code.
int run_spectrum(const RunConfig& config, std::ostream& log);
int run_synthesize(const RunConfig& config, std::ostream& log);
int run_simulate(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);

}  // namespace modalstab
