#include "modalstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "modalstab/errors.hpp"
#include "modalstab/lifting.hpp"
#include "modalstab/special_functions.hpp"
#include "parallel.hpp"

namespace modalstab {

double h2_surrogate(const Eigen::VectorXd& coeffs, const ModeTable& table) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    const double mu = table[n].mu;
    acc += (1.0 + mu * mu) * coeffs[n] * coeffs[n];
  }
  return std::sqrt(acc);
}

double h2_full(const Eigen::VectorXd& coeffs, const ModeTable& table) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    const double k = table[n].kappa;
    acc += (1.0 + k + k * k) * coeffs[n] * coeffs[n];
  }
  return std::sqrt(acc);
}

double laplacian_l2(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& boundary_coeffs,
                    const Eigen::MatrixXd& beta, const ModeTable& table) {
  if (beta.cols() != boundary_coeffs.size()) {
    throw ConsistencyError("boundary coefficients do not match the Gram block");
  }
  const double lambda = table.lambda();
  double acc = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    double flux = 0.0;
    if (boundary_coeffs.size() > 0) flux = beta.row(n).dot(boundary_coeffs);
    const double lap = (table[n].mu - lambda) * coeffs[n] - flux;
    acc += lap * lap;
  }
  return std::sqrt(acc);
}

GridEvaluator::GridEvaluator(const ModeTable& table, int resolution) : resolution_(resolution) {
  if (resolution < 2) throw DomainError("grid resolution must be >= 2");
  const Domain& domain = table.domain();
  const double R = domain.radius;
  const double h = 2.0 * R / (resolution - 1);
  const double bound = R * R * (1.0 + 1e-12);
  auto coord = [&](int i) { return -R + h * i; };
  if (domain.shape == Shape::disk) {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        const Point p{coord(i), coord(j), 0.0};
        if (p.x * p.x + p.y * p.y <= bound) points_.push_back(p);
      }
    }
  } else {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        for (int k = 0; k < resolution; ++k) {
          const Point p{coord(i), coord(j), coord(k)};
          if (p.x * p.x + p.y * p.y + p.z * p.z <= bound) points_.push_back(p);
        }
      }
    }
  }

  // Radial values are shared within each (angular, k) family.
  const auto modes = table.modes();
  std::map<std::pair<int, int>, int> family_of;
  std::vector<const EigenMode*> family_rep;
  std::vector<int> mode_family(modes.size());
  int lmax = 0;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const auto key = std::make_pair(modes[n].angular, modes[n].k);
    auto [it, inserted] = family_of.emplace(key, static_cast<int>(family_rep.size()));
    if (inserted) family_rep.push_back(&modes[n]);
    mode_family[n] = it->second;
    lmax = std::max(lmax, modes[n].angular);
  }

  basis_.resize(static_cast<Eigen::Index>(points_.size()), static_cast<Eigen::Index>(modes.size()));
  const bool disk = domain.shape == Shape::disk;
  detail::parallel_for(points_.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> radial(family_rep.size());
    std::vector<double> angular;
    for (std::size_t p = begin; p < end; ++p) {
      const Point& x = points_[p];
      const double r = disk ? std::hypot(x.x, x.y) : std::sqrt(x.x * x.x + x.y * x.y + x.z * x.z);
      const double phi = std::atan2(x.y, x.x);
      for (std::size_t f = 0; f < family_rep.size(); ++f) {
        radial[f] = radial_factor(*family_rep[f], domain, r);
      }
      if (disk) {
        angular.assign(static_cast<std::size_t>(2 * lmax + 1), 0.0);
        angular[0] = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        const double s = 1.0 / std::sqrt(std::numbers::pi);
        for (int m = 1; m <= lmax; ++m) {
          angular[2 * m - 1] = s * std::cos(m * phi);
          angular[2 * m] = s * std::sin(m * phi);
        }
      } else {
        const double theta = r > 0.0 ? std::acos(std::clamp(x.z / r, -1.0, 1.0)) : 0.0;
        angular = special::real_spherical_harmonics(lmax, theta, phi);
      }
      for (std::size_t n = 0; n < modes.size(); ++n) {
        const auto& mode = modes[n];
        std::size_t a;
        if (disk) {
          a = mode.angular == 0 ? 0
                                : static_cast<std::size_t>(2 * mode.angular -
                                                           (mode.parity == Parity::cos ? 1 : 0));
        } else {
          a = static_cast<std::size_t>(mode.angular * mode.angular + mode.angular + mode.azimuthal);
        }
        basis_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n)) =
            mode.norm_const * radial[mode_family[n]] * angular[a];
      }
    }
  });
}

Eigen::VectorXd GridEvaluator::reconstruct(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != basis_.cols()) throw ConsistencyError("coefficient vector has the wrong length");
  return basis_ * coeffs;
}

double GridEvaluator::linf(const Eigen::VectorXd& coeffs) const {
  const Eigen::VectorXd v = reconstruct(coeffs);
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

Eigen::VectorXd GridEvaluator::linf_series(const Eigen::MatrixXd& states) const {
  if (states.rows() != basis_.cols()) throw ConsistencyError("state matrix has the wrong height");
  Eigen::VectorXd out(states.cols());
  // Blocked to bound the temporary size on fine 3-D grids.
  constexpr Eigen::Index kBlock = 16;
  for (Eigen::Index c = 0; c < states.cols(); c += kBlock) {
    const Eigen::Index w = std::min(kBlock, states.cols() - c);
    const Eigen::MatrixXd values = basis_ * states.middleCols(c, w);
    for (Eigen::Index j = 0; j < w; ++j) out[c + j] = values.col(j).cwiseAbs().maxCoeff();
  }
  return out;
}

double linf_on_grid(const Eigen::VectorXd& coeffs, const ModeTable& table, int resolution) {
  return GridEvaluator(table, resolution).linf(coeffs);
}

DecayFit decay_rate_fit(std::span<const double> times, std::span<const double> values, double t_a,
                        double t_b) {
  if (times.size() != values.size()) throw ConsistencyError("times and values differ in length");
  constexpr double kEdge = 1e-9;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a - kEdge || times[i] > t_b + kEdge) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw DomainError("decay fit needs positive values on the window");
    }
    const double y = std::log(values[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
    ++count;
  }
  if (count < 5) throw InsufficientDataError("decay fit needs at least 5 samples in the window");
  const double n = count;
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  const double intercept = (sy - slope * st) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a - kEdge || times[i] > t_b + kEdge) continue;
    const double dev = std::log(values[i]) - (intercept + slope * times[i]);
    ss += dev * dev;
  }
  return DecayFit{std::exp(intercept), -slope, std::sqrt(ss / n)};
}

std::pair<double, double> gn_exponents(Shape shape) {
  return shape == Shape::disk ? std::make_pair(0.5, 0.5) : std::make_pair(0.25, 0.75);
}

NormSeries compute_norm_series(const Trajectory& trajectory, const ModeTable& table,
                               const ClosedLoopSystem& system, const GainSet* gains,
                               const GridEvaluator& grid) {
  const int samples = trajectory.samples();
  const int n_unstable = static_cast<int>(trajectory.boundary.rows());
  NormSeries s;
  s.times = trajectory.times;
  const Eigen::VectorXd linf = grid.linf_series(trajectory.states);
  const int n_xi = gains != nullptr ? gains->size() : 0;
  s.xi.assign(static_cast<std::size_t>(n_xi), {});

  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd u = trajectory.states.col(k);
    const Eigen::VectorXd v = trajectory.boundary.col(k);
    s.h2_surrogate.push_back(h2_surrogate(u, table));
    s.h2_full.push_back(h2_full(u, table));
    s.linf.push_back(linf[k]);
    s.laplacian_l2.push_back(laplacian_l2(u, v, system.beta, table));
    s.l2.push_back(u.norm());
    s.u_norm.push_back(u.head(n_unstable).norm());
    s.dudt_generator.push_back(system.apply(u).norm());

    Eigen::VectorXd du;
    const double dt = trajectory.dt;
    if (samples < 3) {
      du = samples == 2 ? Eigen::VectorXd((trajectory.states.col(1) - trajectory.states.col(0)) / dt)
                        : Eigen::VectorXd(system.apply(u));
    } else if (k == 0) {
      du = (-3.0 * trajectory.states.col(0) + 4.0 * trajectory.states.col(1) -
            trajectory.states.col(2)) / (2.0 * dt);
    } else if (k == samples - 1) {
      du = (3.0 * trajectory.states.col(k) - 4.0 * trajectory.states.col(k - 1) +
            trajectory.states.col(k - 2)) / (2.0 * dt);
    } else {
      du = (trajectory.states.col(k + 1) - trajectory.states.col(k - 1)) / (2.0 * dt);
    }
    s.dudt_l2.push_back(du.norm());

    for (int i = 0; i < n_xi; ++i) {
      const auto xi = xi_coefficients(*gains, table, system.beta, u.head(n_unstable), i);
      s.xi[i].push_back(lifting_h2_surrogate(xi, table));
    }
  }
  return s;
}

double gn_ratio(const NormSeries& norms, double p, double q) {
  double sup = -1.0;
  for (std::size_t k = 0; k < norms.times.size(); ++k) {
    const double l2 = norms.l2[k];
    const double denom = l2 + std::pow(l2, p) * std::pow(norms.laplacian_l2[k], q);
    if (!(denom > 1e-14)) continue;
    sup = std::max(sup, norms.linf[k] / denom);
  }
  if (sup < 0.0) throw UndefinedRatioError("Gagliardo-Nirenberg ratio undefined for a zero trajectory");
  return sup;
}

double gn_ratio(const Trajectory& trajectory, const ModeTable& table,
                const ClosedLoopSystem& system, const GridEvaluator& grid, double p, double q) {
  return gn_ratio(compute_norm_series(trajectory, table, system, nullptr, grid), p, q);
}

namespace {

ClaimResult check_claim(const std::string& metric, const std::vector<double>& times,
                        const std::vector<double>& values, double t_a, double t_b) {
  ClaimResult c;
  c.metric = metric;
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (!(peak > 0.0)) {
    c.pass = true;
    return c;
  }
  try {
    const DecayFit fit = decay_rate_fit(times, values, t_a, t_b);
    c.fit = fit;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < t_a - 1e-9 || times[i] > t_b + 1e-9) continue;
      c.envelope = std::max(c.envelope, values[i] / (fit.amplitude * std::exp(-fit.rate * times[i])));
    }
    c.pass = fit.rate > 0.0 && c.envelope <= 1.0 + kEnvelopeSlack;
  } catch (const Error&) {
    c.pass = false;
  }
  return c;
}

}  // namespace

ClaimsReport verify_claims(const NormSeries& norms, double t_a, double t_b) {
  ClaimsReport r;
  r.claims.push_back(check_claim("u_norm", norms.times, norms.u_norm, t_a, t_b));
  r.claims.push_back(check_claim("h2_surrogate", norms.times, norms.h2_surrogate, t_a, t_b));
  r.claims.push_back(check_claim("linf", norms.times, norms.linf, t_a, t_b));
  r.claims.push_back(check_claim("laplacian_l2", norms.times, norms.laplacian_l2, t_a, t_b));
  r.claims.push_back(check_claim("dudt_l2", norms.times, norms.dudt_l2, t_a, t_b));
  for (std::size_t i = 0; i < norms.xi.size(); ++i) {
    r.claims.push_back(check_claim("xi_" + std::to_string(i + 1), norms.times, norms.xi[i], t_a, t_b));
  }
  r.degenerate = std::all_of(norms.l2.begin(), norms.l2.end(), [](double v) { return v == 0.0; });
  r.all_pass = std::all_of(r.claims.begin(), r.claims.end(), [](const ClaimResult& c) { return c.pass; });
  return r;
}

}  // namespace modalstab
