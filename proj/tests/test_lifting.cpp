#include <doctest.h>

#include <cmath>

#include "modalstab/controller.hpp"
#include "modalstab/errors.hpp"
#include "modalstab/lifting.hpp"
#include "modalstab/simulator.hpp"
#include "surface_quadrature.hpp"

using namespace modalstab;

namespace {

ModeTable disk_table(int n_sim = 300) {
  return ModeTable::enumerate(make_domain(Shape::disk, 2.0), 6.61, n_sim);
}

const std::vector<double> kScaledDisk{12.34, 14.34, 16.34, 18.34, 20.34};

}  // namespace

TEST_CASE("lift of a single trace matches a quadrature-projected solve") {
  const auto t = disk_table(60);
  const double gamma = 7.5;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(t.unstable_count());
  f[0] = 1.0;
  const auto d = lifting_coefficients(gamma, BoundaryFunction{f}, t);

  CHECK(d.d[0] == doctest::Approx(boundary_inner(t[0], t[0], t.domain()) / (gamma - t[0].mu)).epsilon(1e-14));

  // Oracle: <f, T phi_n> by boundary quadrature, then a dense solve of the
  // projected (diagonal) system.
  const Eigen::MatrixXd rhs = oracle::gram_by_quadrature(t.modes(), t.unstable_modes(), t.domain(), 64) * f;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(t.size(), t.size());
  for (int n = 0; n < t.size(); ++n) {
    lhs(n, n) = n < t.unstable_count() ? gamma - t[n].mu : gamma + t[n].mu;
  }
  const Eigen::VectorXd ref = lhs.fullPivLu().solve(rhs);
  CHECK((d.d - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero boundary data lifts to zero") {
  const auto t = disk_table(50);
  const auto d = lifting_coefficients(3.0, BoundaryFunction{Eigen::VectorXd::Zero(5)}, t);
  CHECK(d.d.cwiseAbs().maxCoeff() == 0.0);
  CHECK(lifting_h2_surrogate(d, t) == 0.0);
}

TEST_CASE("resonances are rejected") {
  const auto t = disk_table(50);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(5);
  try {
    lifting_coefficients(-t[5].mu + 5e-9, BoundaryFunction{f}, t);
    FAIL("expected a resonance error");
  } catch (const ResonanceError& e) {
    CHECK(e.mode_index() == 6);
  }
  CHECK_THROWS_AS(lifting_coefficients(t[1].mu, BoundaryFunction{f}, t), ResonanceError);
  CHECK_NOTHROW(lifting_coefficients(-t[5].mu + 1e-6, BoundaryFunction{f}, t));
}

TEST_CASE("lifting is linear") {
  const auto t = disk_table(100);
  const Eigen::VectorXd f = (Eigen::VectorXd(5) << 1, -2, 0.5, 3, -1).finished();
  const Eigen::VectorXd g = (Eigen::VectorXd(5) << 0.2, 0.1, -4, 1, 2).finished();
  const auto lf = lifting_coefficients(9.0, BoundaryFunction{f}, t);
  const auto lg = lifting_coefficients(9.0, BoundaryFunction{g}, t);
  const auto lc = lifting_coefficients(9.0, BoundaryFunction{2.5 * f - 0.7 * g}, t);
  CHECK((lc.d - (2.5 * lf.d - 0.7 * lg.d)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("resonance growth near mu_1") {
  const auto t = disk_table(40);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(5);
  f[0] = 1.0;
  const double e1 = 1e-3, e2 = 1e-5;
  const double d1 = std::fabs(lifting_coefficients(t[0].mu + e1, BoundaryFunction{f}, t).d[0]);
  const double d2 = std::fabs(lifting_coefficients(t[0].mu + e2, BoundaryFunction{f}, t).d[0]);
  const double slope = std::log(d2 / d1) / std::log(e2 / e1);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("H2 surrogates of a lift") {
  const auto t = disk_table(30);
  LiftingCoefficients c{2.0, Eigen::VectorXd::Zero(t.size())};
  c.d[0] = 1.0;
  CHECK(lifting_h2_surrogate(c, t) == doctest::Approx(std::sqrt(1 + t[0].mu * t[0].mu)).epsilon(1e-15));
  CHECK(lifting_h2_full(c, t) ==
        doctest::Approx(std::sqrt(1 + t[0].kappa + t[0].kappa * t[0].kappa)).epsilon(1e-15));
  c.d *= 2.0;
  CHECK(lifting_h2_surrogate(c, t) == doctest::Approx(2 * std::sqrt(1 + t[0].mu * t[0].mu)));
}

TEST_CASE("lifted components of the controller") {
  const auto t = disk_table(300);
  const GainSet gs = synthesize(t, kScaledDisk);
  const Eigen::VectorXd U = (Eigen::VectorXd(5) << 0.4, -1.1, 0.3, 0.9, -0.2).finished();
  for (int i = 0; i < gs.size(); ++i) {
    const auto xi = xi_coefficients(gs, t, U, i);
    Eigen::VectorXd m(5);
    for (int k = 0; k < 5; ++k) m[k] = 1.0 / (gs.gammas[i] - gs.mu[k]);
    const Eigen::VectorXd expect = gs.gram * m.asDiagonal() * gs.A * U;
    for (int n = 0; n < 5; ++n) {
      CHECK(std::fabs(xi.d[n] * (gs.gammas[i] - t[n].mu) - expect[n]) < 1e-12 * std::max(1.0, std::fabs(expect[n])));
    }
  }
  const auto zero = xi_coefficients(gs, t, Eigen::VectorXd::Zero(5), 2);
  CHECK(zero.d.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(xi_coefficients(gs, t, U, 5), ConsistencyError);

  // The unstable parts of the lifts add up to U.
  Eigen::VectorXd total = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < gs.size(); ++i) total += xi_coefficients(gs, t, U, i).d.head(5);
  CHECK((total - U).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-mode lift by hand") {
  const auto t = disk_table(20);
  const double b = boundary_inner(t[0], t[0], t.domain());
  const GainSet gs = synthesize(t.mu().head(1), Eigen::MatrixXd::Constant(1, 1, b), {9.0});
  // A 1-mode table view: the first row of the extended Gram is all that matters.
  const Eigen::MatrixXd beta = boundary_gram(t.modes(), t.modes().first(1), t.domain());
  const Eigen::VectorXd U = Eigen::VectorXd::Constant(1, 0.7);
  const double c = (1.0 / (9.0 - t[0].mu)) * gs.A(0, 0) * 0.7;
  const auto xi = lifting_coefficients(9.0, (Eigen::VectorXd(1) << c).finished(), beta, t);
  CHECK(xi.d[0] == doctest::Approx(b * c / (9.0 - t[0].mu)).epsilon(1e-14));
  CHECK(xi.d[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("continuity constant of the lift is stable under refinement") {
  Lcg64 rng(7);
  std::vector<Eigen::VectorXd> samples;
  for (int s = 0; s < 8; ++s) {
    Eigen::VectorXd f(5);
    for (int i = 0; i < 5; ++i) f[i] = rng.uniform(-1, 1);
    samples.push_back(f / f.norm());
  }
  auto sup = [&](int n_sim) {
    const auto t = disk_table(n_sim);
    const Eigen::MatrixXd beta = extended_gram(t);
    double best = 0.0;
    for (const auto& f : samples) {
      const auto d = lifting_coefficients(12.0, f, beta, t);
      best = std::max(best, lifting_h2_green(d, f, beta, t));
    }
    return best;
  };
  const double c150 = sup(150);
  const double c300 = sup(300);
  const double c600 = sup(600);
  MESSAGE("sup lift H2 (Green form): ", c150, " ", c300, " ", c600);
  CHECK(std::isfinite(c150));
  CHECK(std::fabs(c300 / c150 - 1.0) < 0.05);
  CHECK(std::fabs(c600 / c300 - 1.0) < 0.05);
}

TEST_CASE("commutation of the lift with time differentiation") {
  const auto t = disk_table(300);
  const GainSet gs = synthesize(t, kScaledDisk);
  const ClosedLoopSystem sys = assemble_closed_loop(t, gs);
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(t.size());
  u0.head(5) << 1.0, -0.5, 0.25, 0.8, -0.3;
  const Trajectory traj = integrate(sys, u0, 0.05, 2.0);
  for (int i = 0; i < 5; ++i) CHECK(commutation_check(gs, t, traj, i, 0.05) < 1e-10);

  Trajectory constant = traj;
  for (int k = 0; k < constant.samples(); ++k) constant.states.col(k) = u0;
  CHECK(commutation_check(gs, t, constant, 0, 0.05) < 1e-13);

  Trajectory zero = traj;
  zero.states.setZero();
  CHECK(commutation_check(gs, t, zero, 1, 0.1) == 0.0);

  Trajectory tiny = traj;
  tiny.times.resize(2);
  tiny.states.conservativeResize(Eigen::NoChange, 2);
  CHECK_THROWS_AS(commutation_check(gs, t, tiny, 0, 0.05), InsufficientDataError);
}
