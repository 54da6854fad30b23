#include <doctest.h>

#include "modalstab/errors.hpp"
#include "modalstab/run_config.hpp"

using namespace modalstab;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("");
  CHECK(c == RunConfig{});
  CHECK(c.shape == Shape::disk);
  CHECK(c.radius == 2.0);
  CHECK(c.lambda == 6.61);
  CHECK(c.n_sim == 300);
  CHECK(c.dt == 0.05);
  CHECK(c.horizon == 4.0);
  CHECK(c.grid == 50);
  CHECK(c.gammas_auto);
  CHECK(c.base_gammas() == std::vector<double>{6.17, 7.17, 8.17, 9.17, 10.17});
  CHECK(default_config(Shape::ball).base_gammas() == std::vector<double>{5.147, 6.147, 7.147, 8.147});
}

TEST_CASE("parse, serialize, parse is the identity") {
  const std::string text = R"(# ball run
domain.shape = ball
domain.radius = 1.75
lambda = 0.1   # tiny
gammas = 1.5, 2.25,3.125
gains.target_margin = -0.25
n_sim = 77
dt = 0.01
horizon = 2.5
grid = 41
seed = 18446744073709551615
mode = open_loop
integrator = rk4
output_dir = /tmp/some dir
fit.start = 0.25
fit.end = 2
initial = constant
initial.value = -0.3
quadrature.refine = 2
)";
  const RunConfig a = parse_config(text);
  CHECK(a.shape == Shape::ball);
  CHECK(a.gammas == std::vector<double>{1.5, 2.25, 3.125});
  CHECK_FALSE(a.gammas_auto);
  CHECK(a.seed == 18446744073709551615ULL);
  CHECK(a.output_dir == "/tmp/some dir");
  CHECK(a.integrator == Integrator::rk4);
  CHECK(a.initial == InitialKind::constant);
  const RunConfig b = parse_config(serialize_config(a));
  CHECK(a == b);
  CHECK(serialize_config(b) == serialize_config(a));

  RunConfig d;
  d.lambda = 0.1 + 0.2;  // not exactly representable in short decimal
  d.dt = 1.0 / 3.0;
  d.horizon = 1.0;
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("errors name the offending field") {
  CHECK(field_of("dt = 0") == "dt");
  CHECK(field_of("dt = -0.1") == "dt");
  CHECK(field_of("dt = 0.5\nhorizon = 0.1") == "horizon");
  CHECK(field_of("domain.shape = square") == "domain.shape");
  CHECK(field_of("domain.radius = 0") == "domain.radius");
  CHECK(field_of("n_sim = 0") == "n_sim");
  CHECK(field_of("n_sim = 3.5") == "n_sim");
  CHECK(field_of("grid = 1") == "grid");
  CHECK(field_of("gammas = 3, 2") == "gammas");
  CHECK(field_of("gammas = 1, x") == "gammas");
  CHECK(field_of("mode = sideways") == "mode");
  CHECK(field_of("integrator = euler") == "integrator");
  CHECK(field_of("seed = -4") == "seed");
  CHECK(field_of("colour = blue") == "colour");
  CHECK(field_of("lambda 5") == "line 1");
  CHECK(field_of("gains.target_margin = 0.1") == "gains.target_margin");
  CHECK(field_of("fit.start = 3\nfit.end = 1") == "fit.end");
  CHECK_THROWS_AS(load_config("/nonexistent/modalstab.cfg"), ConfigError);
}

TEST_CASE("enum names") {
  CHECK(run_mode_from_string("open_loop") == RunMode::open_loop);
  CHECK(to_string(RunMode::closed_loop) == "closed_loop");
  CHECK(initial_kind_from_string("zero") == InitialKind::zero);
  CHECK(to_string(InitialKind::random) == "random");
  CHECK_THROWS_AS(initial_kind_from_string("noise"), ConfigError);
}
