#include "modalstab/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ios>

#include <json.hpp>

#include "modalstab/errors.hpp"
#include "modalstab/io.hpp"
#include "modalstab/lifting.hpp"

namespace modalstab {

using json = nlohmann::ordered_json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const GainValidationError*>(&error)) return kExitGainsNotValidated;
  if (dynamic_cast<const SynthesisError*>(&error) || dynamic_cast<const ResonanceError*>(&error)) {
    return kExitSynthesisFailure;
  }
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const DomainError*>(&error) ||
      dynamic_cast<const CapacityError*>(&error) ||
      dynamic_cast<const InvalidOrderError*>(&error) ||
      dynamic_cast<const UnsupportedOrderError*>(&error) ||
      dynamic_cast<const std::ios_base::failure*>(&error)) {
    return kExitBadInput;
  }
  return kExitVerificationFailed;
}

std::vector<double> reference_mu(Shape shape) {
  if (shape == Shape::disk) return {5.17, 3.07, 0.45};
  return {4.147, 1.566};
}

ModeTable build_table(const RunConfig& config) {
  config.validate();
  ModeTable table = ModeTable::enumerate(config.domain(), config.lambda, config.n_sim);
  if (table.unstable_count() == table.size()) {
    const ModeTable wider = ModeTable::enumerate(config.domain(), config.lambda, config.n_sim + 1);
    if (wider.unstable_count() > config.n_sim) {
      throw ConfigError("n_sim", "must be at least the number of nonnegative eigenvalues");
    }
  }
  return table;
}

namespace {

std::vector<double> auto_base(const RunConfig& config, const ModeTable& table) {
  const int n = table.unstable_count();
  std::vector<double> base = default_gammas(config.shape);
  if (static_cast<int>(base.size()) == n) return base;
  // Unit spacing above the leading eigenvalue, as in the reference lists.
  base.clear();
  for (int i = 0; i < n; ++i) base.push_back(table[0].mu + 1.0 + i);
  return base;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

int largest_multiplicity(const ModeTable& table) {
  int best = 0;
  const int n = table.unstable_count();
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && std::fabs(table[j].mu - table[i].mu) <= 1e-12 * std::max(1.0, std::fabs(table[i].mu))) ++j;
    best = std::max(best, j - i);
    i = j;
  }
  return best;
}

GainsOutcome prepare_gains(const RunConfig& config, const ModeTable& table) {
  const int n = table.unstable_count();
  GainsOutcome out;
  if (!config.gammas_auto) {
    if (static_cast<int>(config.gammas.size()) != n) {
      throw ConfigError("gammas", "expected " + std::to_string(n) + " entries (one per unstable mode), got " +
                                      std::to_string(config.gammas.size()));
    }
    out.source = "explicit";
    out.gains = synthesize(table, config.gammas);
  } else {
    const std::vector<double> base = auto_base(config, table);
    try {
      const AutoScaleResult scaled = auto_scale_gains(table, base, config.target_margin);
      out.scale = scaled.scale;
      out.tried_margins = scaled.margins;
      out.source = scaled.scale == 1.0 ? "reference" : "auto-scaled";
      out.gains = synthesize(table, scaled.gammas);
    } catch (const SynthesisError& e) {
      out.source = "reference";
      out.message = e.what();
      out.gains = synthesize(table, base);
    }
  }
  out.stability = validate_gains(out.gains, config.horizon);
  out.validated = out.stability.hurwitz_direct;
  if (!out.validated && out.message.empty()) {
    out.message = "direct closed-loop margin " + format_double(out.stability.margin_direct) +
                  " is not negative; try gammas = auto";
  }
  return out;
}

Eigen::VectorXd initial_coefficients(const RunConfig& config, const ModeTable& table) {
  const int dim = table.domain().dimension();
  switch (config.initial) {
    case InitialKind::zero:
      return Eigen::VectorXd::Zero(table.size());
    case InitialKind::constant:
      return project_initial_condition(table, CubicPolynomial::constant(dim, config.initial_value),
                                       config.quadrature_refine);
    case InitialKind::random:
      break;
  }
  return project_initial_condition(table, CubicPolynomial::random(dim, config.seed),
                                   config.quadrature_refine);
}

SimulationResult simulate(const RunConfig& config) {
  ModeTable table = build_table(config);
  std::optional<GainsOutcome> gains;
  ClosedLoopSystem system;
  if (config.mode == RunMode::closed_loop) {
    gains = prepare_gains(config, table);
    if (!gains->validated) throw GainValidationError("gains not validated: " + gains->message);
    system = assemble_closed_loop(table, gains->gains);
  } else {
    system = assemble_open_loop(table);
  }
  Eigen::VectorXd u0 = initial_coefficients(config, table);
  Trajectory trajectory = config.mode == RunMode::closed_loop
                              ? integrate(system, u0, config.dt, config.horizon, config.integrator)
                              : open_loop(table, u0, config.dt, config.horizon);
  const GridEvaluator grid(table, config.grid);
  NormSeries norms = compute_norm_series(trajectory, table, system,
                                         gains ? &gains->gains : nullptr, grid);
  const bool diverged =
      trajectory.truncated || norms.h2_surrogate.back() > norms.h2_surrogate.front();
  return SimulationResult{std::move(table), std::move(gains),      std::move(system),
                          std::move(u0),    std::move(trajectory), std::move(norms),
                          diverged};
}

VerificationResult verify(const RunConfig& config, const SimulationResult& sim) {
  VerificationResult r;
  r.claims = verify_claims(sim.norms, config.fit_start, config.fit_end);
  r.pass = r.claims.all_pass;

  const Trajectory& traj = sim.trajectory;
  std::vector<Trajectory> runs{traj};
  if (config.initial == InitialKind::random) {
    const int dim = sim.table.domain().dimension();
    for (int j = 1; j < largest_multiplicity(sim.table); ++j) {
      const Eigen::VectorXd u0 = project_initial_condition(
          sim.table, CubicPolynomial::random(dim, config.seed + static_cast<std::uint64_t>(j)),
          config.quadrature_refine);
      runs.push_back(sim.gains ? integrate(sim.system, u0, config.dt, config.horizon,
                                           config.integrator)
                               : open_loop(sim.table, u0, config.dt, config.horizon));
    }
  }
  try {
    if (sim.gains) {
      r.reduced_fit = reduced_dynamics_fit(runs, sim.gains->gains);
    } else {
      std::vector<Eigen::MatrixXd> blocks;
      for (const auto& t : runs) blocks.push_back(t.unstable_states());
      r.reduced_fit = reduced_dynamics_fit(blocks, traj.dt);
    }
  } catch (const InsufficientDataError& e) {
    r.reduced_fit_note = e.what();
  }

  if (sim.gains && sim.gains->gains.size() > 0 && traj.samples() >= 3) {
    double worst = 0.0;
    for (int i = 0; i < sim.gains->gains.size(); ++i) {
      worst = std::max(worst, commutation_check(sim.gains->gains, sim.table, traj, i, traj.dt));
    }
    r.commutation_deviation = worst;
  }

  const auto [p, q] = gn_exponents(sim.table.domain().shape);
  try {
    r.gn_ratio = gn_ratio(sim.norms, p, q);
  } catch (const UndefinedRatioError& e) {
    r.gn_note = e.what();
  }

  const double lambda = sim.table.lambda();
  for (int k = 1; k + 1 < traj.samples(); ++k) {
    if (traj.times[k] < config.fit_start || traj.times[k] > config.fit_end) continue;
    const Eigen::VectorXd du =
        (traj.states.col(k + 1) - traj.states.col(k - 1)) / (2.0 * traj.dt) -
        lambda * traj.states.col(k);
    r.laplacian_consistency =
        std::max(r.laplacian_consistency, std::fabs(sim.norms.laplacian_l2[k] - du.norm()));
  }
  return r;
}

namespace {

json num(double v) { return format_double(v); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json nums(const Eigen::VectorXd& v) { return nums(to_std(v)); }

json mat(const Eigen::MatrixXd& m) { return matrix_strings(m); }

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  return out;
}

json config_json(const RunConfig& c) {
  json j;
  j["shape"] = to_string(c.shape);
  j["radius"] = num(c.radius);
  j["lambda"] = num(c.lambda);
  j["n_sim"] = c.n_sim;
  return j;
}

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

void write_spectrum_json(const RunConfig& config, const ModeTable& table, const std::string& path) {
  json j = config_json(config);
  j["N"] = table.unstable_count();
  std::vector<double> unstable;
  for (const auto& m : table.unstable_modes()) unstable.push_back(m.mu);
  j["unstable_mu"] = nums(unstable);
  std::vector<double> leading;
  for (int i = 0; i < std::min(table.size(), 10); ++i) leading.push_back(table[i].mu);
  j["leading_mu"] = nums(leading);
  j["reference_mu"] = nums(reference_mu(config.shape));
  j["max_angular"] = table.max_angular();
  j["max_radial_rank"] = table.max_radial_rank();
  write_json(j, path);
}

void write_gains_json(const RunConfig& config, const GainsOutcome& o, const std::string& path) {
  const GainSet& g = o.gains;
  json j = config_json(config);
  j["N"] = g.size();
  j["gamma_source"] = o.source;
  j["scale"] = num(o.scale);
  j["tried_margins"] = nums(o.tried_margins);
  j["gammas"] = nums(g.gammas);
  j["mu"] = nums(g.mu);
  j["B"] = mat(g.gram);
  j["A"] = mat(g.A);
  j["F"] = mat(g.feedback);
  j["S"] = mat(g.weighted_sum);
  j["generator_direct"] = mat(g.generator_direct);
  j["generator_weighted"] = mat(g.generator_weighted);
  j["margin_direct"] = num(o.stability.margin_direct);
  j["margin_weighted"] = num(o.stability.margin_weighted);
  j["hurwitz_direct"] = o.stability.hurwitz_direct;
  j["hurwitz_weighted"] = o.stability.hurwitz_weighted;
  j["condition_number"] = num(g.condition_number);
  j["c1_hat"] = num(o.stability.c1_hat);
  j["sigma_hat"] = num(o.stability.sigma_hat);
  j["validated"] = o.validated;
  j["message"] = o.message;
  j["notes"] = g.notes;
  write_json(j, path);
}

void write_trajectory_csv(const SimulationResult& sim, const std::string& path) {
  const Trajectory& t = sim.trajectory;
  const auto n = t.boundary.rows();
  std::ofstream out = open_text(path);
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",u_" << i + 1;
  out << ",tail_energy";
  for (Eigen::Index i = 0; i < n; ++i) out << ",v_coeff_" << i + 1;
  out << '\n';
  for (int k = 0; k < t.samples(); ++k) {
    out << format_double(t.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(t.states(i, k));
    out << ',' << format_double(t.states.col(k).tail(t.states.rows() - n).squaredNorm());
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(t.boundary(i, k));
    out << '\n';
  }
}

void write_norms_csv(const SimulationResult& sim, const std::string& path) {
  const NormSeries& s = sim.norms;
  std::ofstream out = open_text(path);
  out << "t,h2_surrogate,h2_full,linf,laplacian_l2,u_norm,dudt_l2";
  for (std::size_t i = 0; i < s.xi.size(); ++i) out << ",xi_" << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out << format_double(s.times[k]) << ',' << format_double(s.h2_surrogate[k]) << ','
        << format_double(s.h2_full[k]) << ',' << format_double(s.linf[k]) << ','
        << format_double(s.laplacian_l2[k]) << ',' << format_double(s.u_norm[k]) << ','
        << format_double(s.dudt_l2[k]);
    for (const auto& xi : s.xi) out << ',' << format_double(xi[k]);
    out << '\n';
  }
}

void write_summary_json(const RunConfig& config, const SimulationResult& sim,
                        const std::string& path) {
  const NormSeries& s = sim.norms;
  json j = config_json(config);
  j["mode"] = to_string(config.mode);
  j["integrator"] = config.mode == RunMode::closed_loop ? to_string(config.integrator) : "exact";
  j["N"] = sim.table.unstable_count();
  j["dt"] = num(config.dt);
  j["horizon"] = num(config.horizon);
  j["grid"] = config.grid;
  j["seed"] = config.seed;
  j["initial"] = to_string(config.initial);
  j["samples"] = sim.trajectory.samples();
  if (sim.gains) {
    j["gamma_source"] = sim.gains->source;
    j["gammas"] = nums(sim.gains->gains.gammas);
    j["margin_direct"] = num(sim.gains->stability.margin_direct);
  }
  auto snapshot = [&](std::size_t k) {
    json e;
    e["t"] = num(s.times[k]);
    e["h2_surrogate"] = num(s.h2_surrogate[k]);
    e["linf"] = num(s.linf[k]);
    e["l2"] = num(s.l2[k]);
    return e;
  };
  j["initial_norms"] = snapshot(0);
  j["final_norms"] = snapshot(s.times.size() - 1);
  j["truncated"] = sim.trajectory.truncated;
  j["diverged"] = sim.diverged;
  write_json(j, path);
}

void write_claims_json(const RunConfig& config, const SimulationResult& sim,
                       const VerificationResult& r, const std::string& path) {
  json j = config_json(config);
  j["mode"] = to_string(config.mode);
  j["fit_window"] = nums(std::vector<double>{config.fit_start, config.fit_end});
  if (sim.gains) j["gamma_source"] = sim.gains->source;
  json claims = json::array();
  for (const auto& c : r.claims.claims) {
    json e;
    e["metric"] = c.metric;
    if (c.fit) {
      e["gamma_hat"] = num(c.fit->amplitude);
      e["sigma_hat"] = num(c.fit->rate);
      e["residual"] = num(c.fit->residual);
      e["envelope"] = num(c.envelope);
    } else {
      e["gamma_hat"] = nullptr;
      e["sigma_hat"] = nullptr;
      e["residual"] = nullptr;
      e["envelope"] = nullptr;
    }
    e["pass"] = c.pass;
    claims.push_back(e);
  }
  j["claims"] = claims;
  j["degenerate"] = r.claims.degenerate;
  if (r.reduced_fit) {
    json f;
    f["generator"] = mat(r.reduced_fit->generator);
    f["residual"] = num(r.reduced_fit->residual);
    if (sim.gains) {
      f["distance_direct"] = num(r.reduced_fit->distance_direct);
      f["distance_weighted"] = num(r.reduced_fit->distance_weighted);
      f["closer"] = r.reduced_fit->distance_direct <= r.reduced_fit->distance_weighted
                        ? "direct"
                        : "weighted";
    }
    j["reduced_fit"] = f;
  } else {
    j["reduced_fit"] = nullptr;
    j["reduced_fit_note"] = r.reduced_fit_note;
  }
  j["commutation_deviation"] =
      r.commutation_deviation ? num(*r.commutation_deviation) : json(nullptr);
  json gn;
  const auto [p, q] = gn_exponents(sim.table.domain().shape);
  gn["p"] = num(p);
  gn["q"] = num(q);
  gn["sup_ratio"] = r.gn_ratio ? num(*r.gn_ratio) : json(nullptr);
  if (!r.gn_note.empty()) gn["note"] = r.gn_note;
  j["gagliardo_nirenberg"] = gn;
  j["laplacian_consistency"] = num(r.laplacian_consistency);
  j["pass"] = r.pass;
  write_json(j, path);
}

int run_spectrum(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const ModeTable table = build_table(config);
    ensure_directory(config.output_dir);
    write_mode_table_csv(table, join_path(config.output_dir, "modes.csv"));
    write_spectrum_json(config, table, join_path(config.output_dir, "spectrum.json"));
    log << "N = " << table.unstable_count() << '\n';
    for (int i = 0; i < std::min(table.size(), std::max(table.unstable_count(), 5)); ++i) {
      log << "  mu_" << i + 1 << " = " << format_double(table[i].mu) << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int run_synthesize(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const ModeTable table = build_table(config);
    const GainsOutcome o = prepare_gains(config, table);
    ensure_directory(config.output_dir);
    write_gains_json(config, o, join_path(config.output_dir, "gains.json"));
    for (const auto& note : o.gains.notes) log << "note: " << note << '\n';
    log << "gains (" << o.source << ", scale " << format_double(o.scale) << ")\n";
    log << "  margin_direct = " << format_double(o.stability.margin_direct) << '\n';
    log << "  margin_weighted = " << format_double(o.stability.margin_weighted) << '\n';
    if (!o.validated) {
      log << "gains not validated: " << o.message << '\n';
      return static_cast<int>(kExitGainsNotValidated);
    }
    return static_cast<int>(kExitOk);
  });
}

int run_simulate(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const SimulationResult sim = simulate(config);
    ensure_directory(config.output_dir);
    write_trajectory_csv(sim, join_path(config.output_dir, "trajectory.csv"));
    write_norms_csv(sim, join_path(config.output_dir, "norms.csv"));
    write_snapshots(join_path(config.output_dir, "snapshots.bin"), sim.trajectory.states);
    write_summary_json(config, sim, join_path(config.output_dir, "summary.json"));
    if (sim.trajectory.truncated) {
      log << "warning: state overflow, trajectory truncated at t = "
          << format_double(sim.trajectory.times.back()) << '\n';
    }
    log << "simulated " << sim.trajectory.samples() << " samples ("
        << (sim.diverged ? "diverged" : "bounded") << ")\n";
    return static_cast<int>(kExitOk);
  });
}

int run_verify(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const SimulationResult sim = simulate(config);
    const VerificationResult r = verify(config, sim);
    ensure_directory(config.output_dir);
    write_claims_json(config, sim, r, join_path(config.output_dir, "claims.json"));
    if (r.claims.degenerate) log << "degenerate run: zero state, claims hold vacuously\n";
    for (const auto& c : r.claims.claims) {
      if (!c.pass) {
        log << "FAIL " << c.metric;
        if (c.fit) log << " (sigma_hat = " << format_double(c.fit->rate) << ")";
        log << '\n';
      }
    }
    log << (r.pass ? "all claims pass\n" : "verification failed\n");
    return static_cast<int>(r.pass ? kExitOk : kExitVerificationFailed);
  });
}

}  // namespace modalstab
