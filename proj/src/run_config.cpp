#include "modalstab/run_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "modalstab/errors.hpp"
#include "modalstab/io.hpp"

namespace modalstab {

std::string to_string(RunMode mode) {
  return mode == RunMode::closed_loop ? "closed_loop" : "open_loop";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "closed_loop") return RunMode::closed_loop;
  if (name == "open_loop") return RunMode::open_loop;
  throw ConfigError("mode", "expected closed_loop or open_loop, got '" + name + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::random: return "random";
    case InitialKind::zero: return "zero";
    case InitialKind::constant: return "constant";
  }
  return "random";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "random") return InitialKind::random;
  if (name == "zero") return InitialKind::zero;
  if (name == "constant") return InitialKind::constant;
  throw ConfigError("initial", "expected random, zero or constant, got '" + name + "'");
}

std::vector<double> default_gammas(Shape shape) {
  if (shape == Shape::disk) return {6.17, 7.17, 8.17, 9.17, 10.17};
  return {5.147, 6.147, 7.147, 8.147};
}

RunConfig default_config(Shape shape) {
  RunConfig c;
  c.shape = shape;
  return c;
}

std::vector<double> RunConfig::base_gammas() const {
  return gammas_auto ? default_gammas(shape) : gammas;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(std::isfinite(radius) && radius > 0.0, "domain.radius", "must be positive");
  require(std::isfinite(lambda), "lambda", "must be finite");
  require(n_sim >= 1, "n_sim", "must be at least 1");
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be positive");
  require(std::isfinite(horizon) && horizon >= dt, "horizon", "must be at least dt");
  require(grid >= 2, "grid", "must be at least 2");
  require(std::isfinite(target_margin) && target_margin < 0.0, "gains.target_margin",
          "must be negative");
  require(fit_start >= 0.0 && fit_end > fit_start, "fit.end", "window must satisfy 0 <= start < end");
  require(std::isfinite(initial_value), "initial.value", "must be finite");
  require(quadrature_refine >= 1, "quadrature.refine", "must be at least 1");
  if (!gammas_auto) {
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      require(std::isfinite(gammas[i]) && gammas[i] > 0.0, "gammas", "entries must be positive");
      require(i == 0 || gammas[i] > gammas[i - 1], "gammas", "entries must be strictly increasing");
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError(key, "expected a real number, got '" + value + "'");
  }
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return x;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
  }
  return x;
}

int parse_count(const std::string& key, const std::string& value) {
  const long long x = parse_int(key, value);
  if (x < 0 || x > 1'000'000) throw ConfigError(key, "out of range: " + value);
  return static_cast<int>(x);
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "domain.shape") {
    try {
      c.shape = shape_from_string(value);
    } catch (const Error&) {
      throw ConfigError(key, "expected disk or ball, got '" + value + "'");
    }
  } else if (key == "domain.radius") {
    c.radius = parse_real(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_real(key, value);
  } else if (key == "gammas") {
    c.gammas.clear();
    if (value == "auto") {
      c.gammas_auto = true;
    } else {
      c.gammas_auto = false;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        c.gammas.push_back(parse_real(key, item));
      }
    }
  } else if (key == "gains.target_margin") {
    c.target_margin = parse_real(key, value);
  } else if (key == "n_sim") {
    c.n_sim = parse_count(key, value);
  } else if (key == "dt") {
    c.dt = parse_real(key, value);
  } else if (key == "horizon") {
    c.horizon = parse_real(key, value);
  } else if (key == "grid") {
    c.grid = parse_count(key, value);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, value);
  } else if (key == "mode") {
    c.mode = run_mode_from_string(value);
  } else if (key == "integrator") {
    try {
      c.integrator = integrator_from_string(value);
    } catch (const Error&) {
      throw ConfigError(key, "expected expm_step or rk4, got '" + value + "'");
    }
  } else if (key == "output_dir") {
    if (value.empty()) throw ConfigError(key, "must not be empty");
    c.output_dir = value;
  } else if (key == "fit.start") {
    c.fit_start = parse_real(key, value);
  } else if (key == "fit.end") {
    c.fit_end = parse_real(key, value);
  } else if (key == "initial") {
    c.initial = initial_kind_from_string(value);
  } else if (key == "initial.value") {
    c.initial_value = parse_real(key, value);
  } else if (key == "quadrature.refine") {
    c.quadrature_refine = parse_count(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "domain.shape = " << to_string(c.shape) << '\n';
  out << "domain.radius = " << format_double(c.radius) << '\n';
  out << "lambda = " << format_double(c.lambda) << '\n';
  out << "gammas = ";
  if (c.gammas_auto) {
    out << "auto";
  } else {
    for (std::size_t i = 0; i < c.gammas.size(); ++i) {
      out << (i ? ", " : "") << format_double(c.gammas[i]);
    }
  }
  out << '\n';
  out << "gains.target_margin = " << format_double(c.target_margin) << '\n';
  out << "n_sim = " << c.n_sim << '\n';
  out << "dt = " << format_double(c.dt) << '\n';
  out << "horizon = " << format_double(c.horizon) << '\n';
  out << "grid = " << c.grid << '\n';
  out << "seed = " << c.seed << '\n';
  out << "mode = " << to_string(c.mode) << '\n';
  out << "integrator = " << to_string(c.integrator) << '\n';
  out << "output_dir = " << c.output_dir << '\n';
  out << "fit.start = " << format_double(c.fit_start) << '\n';
  out << "fit.end = " << format_double(c.fit_end) << '\n';
  out << "initial = " << to_string(c.initial) << '\n';
  out << "initial.value = " << format_double(c.initial_value) << '\n';
  out << "quadrature.refine = " << c.quadrature_refine << '\n';
  return out.str();
}

}  // namespace modalstab
