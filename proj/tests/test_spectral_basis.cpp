#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "modalstab/errors.hpp"
#include "modalstab/spectral_basis.hpp"
#include "oracles.hpp"
#include "spectrum_oracle.hpp"
#include "surface_quadrature.hpp"

using namespace modalstab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJ01 = 2.404825557695773;

/// Radial integral of c_a c_b f_a f_b r^(d-1) by Gauss-Legendre with the
/// libstdc++ Bessel functions.
double radial_overlap(const EigenMode& a, const EigenMode& b, const Domain& d) {
  static std::vector<double> x, w;
  if (x.empty()) oracle::gauss_legendre(120, x, w);
  const double R = d.radius;
  auto f = [&](const EigenMode& m, double r) {
    const double z = m.alpha * r / R;
    return d.shape == Shape::disk ? std::cyl_bessel_j(static_cast<double>(m.angular), z)
                                  : std::sph_bessel(static_cast<unsigned>(m.angular), z);
  };
  const int pw = d.shape == Shape::disk ? 1 : 2;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = R * (x[i] + 1) / 2;
    s += w[i] * R / 2 * f(a, r) * f(b, r) * std::pow(r, pw);
  }
  return a.norm_const * b.norm_const * s;
}

}  // namespace

TEST_CASE("disk spectrum for the standard configuration") {
  const auto t = ModeTable::enumerate(make_domain(Shape::disk, 2.0), 6.61, 300);
  REQUIRE(t.size() == 300);
  CHECK(t.unstable_count() == 5);
  const double expect[] = {5.16420, 2.93951, 2.93951, 0.01650, 0.01650};
  for (int i = 0; i < 5; ++i) CHECK(t[i].mu == doctest::Approx(expect[i]).epsilon(2e-4));
  CHECK(t[5].mu < 0.0);
  CHECK(t[0].angular == 0);
  CHECK(t[0].k == 1);
  CHECK(t[1].parity == Parity::cos);
  CHECK(t[2].parity == Parity::sin);
  for (int i = 0; i < t.size(); ++i) CHECK(t[i].index == i + 1);
}

TEST_CASE("ball spectrum for the standard configuration") {
  const auto t = ModeTable::enumerate(make_domain(Shape::ball, 2.0), 6.61, 300);
  CHECK(t.unstable_count() == 4);
  CHECK(t[0].mu == doctest::Approx(6.61 - kPi * kPi / 4).epsilon(1e-14));
  for (int i = 1; i < 4; ++i) CHECK(t[i].mu == doctest::Approx(1.56232).epsilon(2e-5));
  CHECK(t[1].azimuthal == -1);
  CHECK(t[3].azimuthal == 1);
}

TEST_CASE("zero lambda has no unstable modes") {
  const auto t = ModeTable::enumerate(make_domain(Shape::disk, 2.0), 0.0, 10);
  CHECK(t.unstable_count() == 0);
  CHECK(t.unstable_modes().empty());
  CHECK_THROWS_AS(ModeTable::enumerate(make_domain(Shape::disk, 2.0), -1.0, 10), DomainError);
  CHECK_THROWS_AS(ModeTable::enumerate(make_domain(Shape::disk, 2.0), 1.0, 0), DomainError);
  CHECK_THROWS_AS(make_domain(Shape::ball, 0.0), DomainError);
}

TEST_CASE("enumerated eigenvalues match the bisection oracle") {
  for (Shape shape : {Shape::disk, Shape::ball}) {
    const double R = 2.0;
    const auto t = ModeTable::enumerate(make_domain(shape, R), 6.61, 300);
    const auto kappas = oracle::kappas(shape, R, t[t.size() - 1].alpha + 0.5);
    REQUIRE(kappas.size() >= 300);
    for (int i = 0; i < t.size(); ++i) {
      CAPTURE(i);
      CHECK(std::fabs(t[i].mu - (6.61 - kappas[i])) < 1e-10);
      CHECK(std::fabs(t[i].kappa - (t[i].alpha / R) * (t[i].alpha / R)) < 1e-12 * t[i].kappa);
    }
  }
}

TEST_CASE("table ordering is descending in mu") {
  const auto t = ModeTable::enumerate(make_domain(Shape::ball, 1.5), 3.0, 200);
  for (int i = 1; i < t.size(); ++i) CHECK(t[i].mu <= t[i - 1].mu);
}

TEST_CASE("capacity limit") {
  CHECK_THROWS_AS(ModeTable::enumerate(make_domain(Shape::disk, 2.0), 6.61, 200000), CapacityError);
}

TEST_CASE("eval_mode closed forms") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 30);
  const double center = 1.0 / (std::sqrt(kPi) * 2.0 * oracle::bessel_j_series(1, kJ01));
  CHECK(eval_mode(t[0], d, {0, 0, 0}) == doctest::Approx(center).epsilon(1e-13));
  CHECK(center == doctest::Approx(0.543381).epsilon(1e-6));
  for (int i = 0; i < t.size(); ++i) {
    for (double th : {0.0, 0.9, 2.5, 4.0}) {
      CHECK(std::fabs(eval_mode(t[i], d, {2 * std::cos(th), 2 * std::sin(th), 0})) < 1e-12);
    }
  }
  CHECK_THROWS_AS(eval_mode(t[0], d, {2.1, 0, 0}), DomainError);

  const Domain b = make_domain(Shape::ball, 2.0);
  const auto tb = ModeTable::enumerate(b, 6.61, 30);
  for (int i = 0; i < tb.size(); ++i) {
    CHECK(std::fabs(eval_mode(tb[i], b, {0, 0, 2})) < 1e-12);
    CHECK(std::fabs(eval_mode(tb[i], b, {1.2, -1.6, 0})) < 1e-12);
  }
}

TEST_CASE("eval_mode matches the oracle formula pointwise") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 40);
  for (int i = 0; i < t.size(); ++i) {
    const auto& m = t[i];
    for (double r : {0.3, 1.1, 1.9}) {
      for (double th : {0.4, 2.2}) {
        double ang = 1.0 / std::sqrt(2 * kPi);
        if (m.angular > 0) {
          ang = (m.parity == Parity::cos ? std::cos(m.angular * th) : std::sin(m.angular * th)) /
                std::sqrt(kPi);
        }
        const double ref = m.norm_const * oracle::bessel_j(m.angular, m.alpha * r / 2) * ang;
        CHECK(eval_mode(m, d, {r * std::cos(th), r * std::sin(th), 0}) ==
              doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("modes are orthonormal") {
  for (Shape shape : {Shape::disk, Shape::ball}) {
    const Domain d = make_domain(shape, 2.0);
    const auto t = ModeTable::enumerate(d, 6.61, 30);
    for (int i = 0; i < t.size(); ++i) {
      for (int j = i; j < t.size(); ++j) {
        if (!t[i].same_angular(t[j])) continue;  // angular factors are orthonormal
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::fabs(radial_overlap(t[i], t[j], d) - (i == j)) < 1e-9);
      }
    }
  }
}

TEST_CASE("modes are orthonormal under full 2-D quadrature") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 30);
  std::vector<double> x, w;
  oracle::gauss_legendre(80, x, w);
  const int nt = 64;
  Eigen::MatrixXd vals(80 * nt, t.size());
  Eigen::VectorXd wt(80 * nt);
  for (int a = 0; a < 80; ++a) {
    const double r = 1.0 + x[a];
    for (int b = 0; b < nt; ++b) {
      const double th = 2 * kPi * b / nt;
      wt[a * nt + b] = w[a] * r * 2 * kPi / nt;
      for (int n = 0; n < t.size(); ++n) vals(a * nt + b, n) = eval_mode(t[n], d, {r * std::cos(th), r * std::sin(th), 0});
    }
  }
  const Eigen::MatrixXd g = vals.transpose() * wt.asDiagonal() * vals;
  CHECK((g - Eigen::MatrixXd::Identity(t.size(), t.size())).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("normal trace closed forms") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 10);
  const double expect = -kJ01 / (std::sqrt(kPi) * 4.0);
  for (double th : {0.0, 1.0, 3.0}) {
    CHECK(normal_trace(t[0], d, {2 * std::cos(th), 2 * std::sin(th), 0}) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(expect == doctest::Approx(-0.339194).epsilon(1e-5));
  CHECK(std::fabs(normal_trace(t[1], d, {0, 2, 0})) < 1e-15);  // (1,1,cos) at theta = pi/2
  CHECK_THROWS_AS(normal_trace(t[0], d, {1.0, 0, 0}), DomainError);

  const Domain b = make_domain(Shape::ball, 2.0);
  const auto tb = ModeTable::enumerate(b, 6.61, 10);
  const double y00 = 1.0 / std::sqrt(4 * kPi);
  const double ball_expect = -(kPi / 2) * std::sqrt(2.0 / 8.0) * y00;
  CHECK(normal_trace(tb[0], b, {0, 0, 2}) == doctest::Approx(ball_expect).epsilon(1e-13));
  CHECK(normal_trace(tb[0], b, {1.2, 0, -1.6}) == doctest::Approx(ball_expect).epsilon(1e-13));
  CHECK(ball_expect == doctest::Approx(-0.221557).epsilon(1e-5));
}

TEST_CASE("normal trace agrees with a radial finite difference") {
  for (Shape shape : {Shape::disk, Shape::ball}) {
    const Domain d = make_domain(shape, 2.0);
    const auto t = ModeTable::enumerate(d, 6.61, 30);
    const Point dir = shape == Shape::disk ? Point{0.6, 0.8, 0} : Point{0.48, 0.64, 0.6};
    for (int i = 0; i < t.size(); ++i) {
      auto f = [&](double r) { return eval_mode(t[i], d, {r * dir.x, r * dir.y, r * dir.z}); };
      const double h = 1e-3;
      const double fd = (25 * f(2.0) - 48 * f(2 - h) + 36 * f(2 - 2 * h) - 16 * f(2 - 3 * h) +
                         3 * f(2 - 4 * h)) / (12 * h);
      CAPTURE(i);
      CHECK(normal_trace(t[i], d, {2 * dir.x, 2 * dir.y, 2 * dir.z}) ==
            doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("trace amplitude invariant |trace_amp| = sqrt(2) alpha / R^2 on the disk") {
  const auto t = ModeTable::enumerate(make_domain(Shape::disk, 1.7), 4.0, 50);
  for (int i = 0; i < t.size(); ++i) {
    CHECK(std::fabs(t[i].trace_amp) == doctest::Approx(std::sqrt(2.0) * t[i].alpha / (1.7 * 1.7)));
    CHECK(t[i].trace_amp * (t[i].k % 2 ? -1 : 1) > 0);
  }
  const auto b = ModeTable::enumerate(make_domain(Shape::ball, 1.7), 4.0, 50);
  for (int i = 0; i < b.size(); ++i) {
    CHECK(std::fabs(b[i].trace_amp) ==
          doctest::Approx(b[i].alpha / 1.7 * std::sqrt(2.0 / std::pow(1.7, 3))));
  }
}

TEST_CASE("boundary inner products") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 30);
  CHECK(boundary_inner(t[0], t[0], d) == doctest::Approx(2 * kJ01 * kJ01 / 8).epsilon(1e-14));
  CHECK(boundary_inner(t[0], t[0], d) == doctest::Approx(1.445796).epsilon(1e-6));
  CHECK(boundary_inner(t[0], t[1], d) == 0.0);

  const Domain b = make_domain(Shape::ball, 2.0);
  const auto tb = ModeTable::enumerate(b, 6.61, 300);
  const EigenMode* m01 = nullptr;
  const EigenMode* m02 = nullptr;
  for (const auto& m : tb.modes()) {
    if (m.angular == 0 && m.k == 1) m01 = &m;
    if (m.angular == 0 && m.k == 2) m02 = &m;
  }
  REQUIRE(m01 != nullptr);
  REQUIRE(m02 != nullptr);
  CHECK(boundary_inner(*m01, *m02, b) == doctest::Approx(-kPi * kPi / 2).epsilon(1e-13));
}

TEST_CASE("boundary Gram matches surface quadrature") {
  for (Shape shape : {Shape::disk, Shape::ball}) {
    const Domain d = make_domain(shape, 2.0);
    const auto t = ModeTable::enumerate(d, 6.61, 30);
    const Eigen::MatrixXd closed = boundary_gram(t.modes(), t.modes(), d);
    const Eigen::MatrixXd quad = oracle::gram_by_quadrature(t.modes(), t.modes(), d, 24);
    CHECK((closed - quad).cwiseAbs().maxCoeff() < 1e-9);
    for (int i = 0; i < t.size(); ++i) {
      CHECK(closed(i, i) == doctest::Approx(2 * t[i].alpha * t[i].alpha / 8).epsilon(1e-13));
    }
    CHECK((closed - closed.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("project_function") {
  const Domain d = make_domain(Shape::disk, 2.0);
  const auto t = ModeTable::enumerate(d, 6.61, 40);
  const auto e3 = project_function([&](const Point& p) { return eval_mode(t[2], d, p); }, t.modes(), d);
  for (int i = 0; i < t.size(); ++i) CHECK(std::fabs(e3[i] - (i == 2)) < 1e-9);

  const auto zero = project_function([](const Point&) { return 0.0; }, t.modes(), d);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  auto bump = [](const Point& p) { return 4.0 - p.x * p.x - p.y * p.y; };
  const auto c1 = project_function(bump, t.modes(), d, 1);
  const auto c2 = project_function(bump, t.modes(), d, 2);
  CHECK(std::fabs(c1[0] - c2[0]) < 1e-8 * std::fabs(c2[0]));
  // Independent radial Simpson oracle for the radially symmetric mode.
  const double ref = std::sqrt(2 * kPi) * t[0].norm_const *
                     oracle::simpson([&](double r) { return (4 - r * r) * oracle::bessel_j(0, t[0].alpha * r / 2) * r; },
                                     0.0, 2.0, 4000);
  CHECK(c1[0] == doctest::Approx(ref).epsilon(1e-10));
  for (int i = 0; i < t.size(); ++i) {
    if (t[i].angular != 0) CHECK(std::fabs(c1[i]) < 1e-12);
  }

  const Domain b = make_domain(Shape::ball, 2.0);
  const auto tb = ModeTable::enumerate(b, 6.61, 30);
  const auto f7 = project_function([&](const Point& p) { return eval_mode(tb[6], b, p); }, tb.modes(), b);
  for (int i = 0; i < tb.size(); ++i) CHECK(std::fabs(f7[i] - (i == 6)) < 1e-9);
}

TEST_CASE("mode table CSV") {
  const auto t = ModeTable::enumerate(make_domain(Shape::disk, 2.0), 6.61, 12);
  const auto path = (std::filesystem::temp_directory_path() / "modalstab_modes_test.csv").string();
  write_mode_table_csv(t, path);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "n,m,parity,k,alpha,kappa,mu,norm_const,trace_amp");
  CHECK(first.rfind("1,0,cos,1,2.40482555769577", 0) == 0);
  int lines = 2;
  std::string s;
  while (std::getline(in, s)) ++lines;
  CHECK(lines == 13);

  const auto tb = ModeTable::enumerate(make_domain(Shape::ball, 2.0), 6.61, 5);
  write_mode_table_csv(tb, path);
  std::ifstream in2(path);
  std::getline(in2, header);
  CHECK(header == "n,l,m,k,alpha,kappa,mu,norm_const,trace_amp");
  std::filesystem::remove(path);
}
