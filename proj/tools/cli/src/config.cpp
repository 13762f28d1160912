#include "ksnd/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ksnd/cli/errors.hpp"

namespace ksnd::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw std::invalid_argument("expected a real number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(p));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

Vec3 to_vec3(const std::string& s) {
  const auto v = to_list(s);
  if (v.size() != 3) throw std::invalid_argument("expected three comma-separated reals");
  return {v[0], v[1], v[2]};
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string vec(const Vec3& v) { return num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]); }

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& global_keys() {
  static const std::map<std::string, Setter> keys = {
      {"grid.n", [](RunConfig& c, const std::string& v) { c.grid_n = to_uint(v); }},
      {"grid.box_length", [](RunConfig& c, const std::string& v) { c.box_length = to_double(v); }},
      {"electrons.count", [](RunConfig& c, const std::string& v) { c.electron_count = to_uint(v); }},
      {"electrons.initial",
       [](RunConfig& c, const std::string& v) {
         if (v == "gaussian_packets") {
           c.initial = InitialKind::gaussian_packets;
         } else if (v == "file") {
           c.initial = InitialKind::file;
         } else {
           throw std::invalid_argument("expected gaussian_packets or file, got '" + v + "'");
         }
       }},
      {"electrons.file", [](RunConfig& c, const std::string& v) { c.initial_file = v; }},
      {"electrons.orthonormalize", [](RunConfig& c, const std::string& v) { c.orthonormalize = to_bool(v); }},
      {"exchange.lambda", [](RunConfig& c, const std::string& v) { c.exchange.lambda = to_double(v); }},
      {"exchange.q", [](RunConfig& c, const std::string& v) { c.exchange.q = to_double(v); }},
      {"hartree.enabled", [](RunConfig& c, const std::string& v) { c.hartree = to_bool(v); }},
      {"softening.epsilon", [](RunConfig& c, const std::string& v) { c.exchange.epsilon = to_double(v); }},
      {"time.dt", [](RunConfig& c, const std::string& v) { c.dt = to_double(v); }},
      {"time.window_tau", [](RunConfig& c, const std::string& v) { c.window_tau = to_double(v); }},
      {"time.total", [](RunConfig& c, const std::string& v) { c.total = to_double(v); }},
      {"picard.tol", [](RunConfig& c, const std::string& v) { c.picard_tol = to_double(v); }},
      {"picard.max_iters",
       [](RunConfig& c, const std::string& v) {
         const auto n = to_uint(v);
         if (n > 1000000) throw std::invalid_argument("picard.max_iters too large");
         c.max_iters = static_cast<int>(n);
       }},
      {"picard.propagator_bound", [](RunConfig& c, const std::string& v) { c.propagator_bound = to_double(v); }},
      {"forces.convention",
       [](RunConfig& c, const std::string& v) { c.convention = force_convention_from_string(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_uint(v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.stride", [](RunConfig& c, const std::string& v) { c.stride = to_uint(v); }},
      {"output.checkpoints", [](RunConfig& c, const std::string& v) { c.checkpoints = to_bool(v); }},
      {"probe.samples", [](RunConfig& c, const std::string& v) { c.probe.samples = to_uint(v); }},
      {"probe.calibrate", [](RunConfig& c, const std::string& v) { c.probe.calibrate = to_uint(v); }},
      {"probe.margin", [](RunConfig& c, const std::string& v) { c.probe.margin = to_double(v); }},
      {"probe.orbitals", [](RunConfig& c, const std::string& v) { c.probe.orbitals = to_uint(v); }},
      {"probe.radius", [](RunConfig& c, const std::string& v) { c.probe.radius = to_double(v); }},
      {"probe.lp", [](RunConfig& c, const std::string& v) { c.probe.lp = to_double(v); }},
      {"probe.alpha", [](RunConfig& c, const std::string& v) { c.probe.alpha = to_list(v); }},
      {"probe.beta", [](RunConfig& c, const std::string& v) { c.probe.beta = to_list(v); }},
      {"probe.min_density", [](RunConfig& c, const std::string& v) { c.probe.min_density = to_list(v); }},
      {"probe.perturbation", [](RunConfig& c, const std::string& v) { c.probe.perturbation = to_double(v); }},
      {"probe.fields", [](RunConfig& c, const std::string& v) { c.probe.fields = to_uint(v); }},
      {"probe.thetas", [](RunConfig& c, const std::string& v) { c.probe.thetas = to_list(v); }},
      {"probe.dt", [](RunConfig& c, const std::string& v) { c.probe.dt = to_double(v); }},
      {"probe.p", [](RunConfig& c, const std::string& v) { c.probe.p = to_double(v); }},
      {"probe.sizes", [](RunConfig& c, const std::string& v) { c.probe.sizes = to_list(v); }},
      {"admissibility.tau_max", [](RunConfig& c, const std::string& v) { c.admissibility.tau_max = to_double(v); }},
      {"admissibility.delta", [](RunConfig& c, const std::string& v) { c.admissibility.delta = to_double(v); }},
      {"admissibility.A", [](RunConfig& c, const std::string& v) { c.admissibility.A = to_double(v); }},
      {"admissibility.C", [](RunConfig& c, const std::string& v) { c.admissibility.C = to_double(v); }},
      {"admissibility.C1", [](RunConfig& c, const std::string& v) { c.admissibility.C1 = to_double(v); }},
      {"admissibility.C2", [](RunConfig& c, const std::string& v) { c.admissibility.C2 = to_double(v); }},
      {"admissibility.lipschitz_scale",
       [](RunConfig& c, const std::string& v) { c.admissibility.lipschitz_scale = to_double(v); }},
  };
  return keys;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Block {
  std::string kind;
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

bool is_multiple(double big, double small) {
  const double r = big / small;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r) && std::round(r) >= 1.0;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) {
          msg += "\n  ";
          if (i.line > 0) msg += "line " + std::to_string(i.line) + ": ";
          msg += i.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

Physics RunConfig::physics() const {
  Physics p;
  p.exchange = exchange;
  p.hartree = hartree;
  p.convention = convention;
  return p;
}

SolverSettings RunConfig::solver() const {
  SolverSettings s;
  s.dt = dt;
  s.picard_tol = picard_tol;
  s.max_picard_iters = max_iters;
  s.window_tau = window_tau;
  s.propagator_bound = propagator_bound;
  return s;
}

ProbeSettings RunConfig::probe_settings() const {
  ProbeSettings ps;
  ps.samples = probe.samples;
  ps.calibrate = probe.calibrate;
  ps.margin = probe.margin;
  ps.seed = seed;
  ps.orbitals = probe.orbitals;
  ps.radius = probe.radius;
  return ps;
}

GridPtr RunConfig::make_grid() const { return Grid::make(grid_n, box_length); }

RunConfig parse_config(const std::string& text) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> globals;
  std::vector<Block> blocks;

  std::istringstream is(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s == "[nucleus]" || s == "[orbital]") {
        blocks.push_back({s.substr(1, s.size() - 2), line, {}});
      } else {
        issues.push_back({line, "unknown block " + s + " (expected [nucleus] or [orbital])"});
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      issues.push_back({line, "missing key before '='"});
      continue;
    }
    const bool global = key.find('.') != std::string::npos || key == "seed";
    auto& target = global ? globals : (blocks.empty() ? globals : blocks.back().entries);
    if (!global && blocks.empty()) {
      issues.push_back({line, "unknown key '" + key + "'"});
      continue;
    }
    if (target.count(key)) {
      issues.push_back({line, "duplicate key '" + key + "' (first set on line " + std::to_string(target[key].line) + ")"});
      continue;
    }
    target[key] = {value, line};
  }

  RunConfig c;
  std::map<std::string, std::size_t> where;
  for (const auto& [key, e] : globals) {
    const auto it = global_keys().find(key);
    if (it == global_keys().end()) {
      issues.push_back({e.line, "unknown key '" + key + "'"});
      continue;
    }
    try {
      it->second(c, e.value);
      where[key] = e.line;
    } catch (const std::exception& ex) {
      issues.push_back({e.line, key + ": " + ex.what()});
    }
  }
  const auto at = [&](const char* key) {
    const auto it = where.find(key);
    return it == where.end() ? std::size_t{0} : it->second;
  };

  for (const auto& b : blocks) {
    const auto get = [&](const char* key, bool required, auto parse, auto& dest) {
      const auto it = b.entries.find(key);
      if (it == b.entries.end()) {
        if (required) issues.push_back({b.line, "[" + b.kind + "] block is missing '" + key + "'"});
        return;
      }
      try {
        dest = parse(it->second.value);
      } catch (const std::exception& ex) {
        issues.push_back({it->second.line, std::string(key) + ": " + ex.what()});
      }
    };
    const std::vector<std::string> allowed =
        b.kind == "nucleus" ? std::vector<std::string>{"mass", "charge", "position", "velocity"}
                            : std::vector<std::string>{"center", "width", "momentum"};
    for (const auto& [key, e] : b.entries) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        issues.push_back({e.line, "unknown key '" + key + "' in [" + b.kind + "] block"});
      }
    }
    if (b.kind == "nucleus") {
      double mass = 0.0;
      std::uint64_t charge = 0;
      Vec3 pos{0.0, 0.0, 0.0};
      Vec3 vel{0.0, 0.0, 0.0};
      get("mass", true, to_double, mass);
      get("charge", true, to_uint, charge);
      get("position", true, to_vec3, pos);
      get("velocity", false, to_vec3, vel);
      if (!(mass > 0.0) || !std::isfinite(mass)) issues.push_back({b.line, "nucleus mass must be positive"});
      if (charge < 1 || charge > 1000) issues.push_back({b.line, "nucleus charge must be an integer in [1, 1000]"});
      c.nuclei.masses.push_back(mass);
      c.nuclei.charges.push_back(static_cast<int>(charge));
      c.nuclei.positions.push_back(pos);
      c.nuclei.velocities.push_back(vel);
    } else {
      OrbitalSpec o;
      get("center", true, to_vec3, o.center);
      get("width", true, to_double, o.width);
      get("momentum", false, to_vec3, o.momentum);
      if (!(o.width > 0.0) || !std::isfinite(o.width)) issues.push_back({b.line, "orbital width must be positive"});
      c.orbitals.push_back(o);
    }
  }

  // Required keys and ranges.
  for (const char* key : {"grid.n", "grid.box_length", "electrons.count", "time.dt", "time.total"}) {
    if (!where.count(key)) issues.push_back({0, "missing required key '" + std::string(key) + "'"});
  }
  if (where.count("grid.n") && (!is_power_of_two(c.grid_n) || c.grid_n < 8)) {
    issues.push_back({at("grid.n"), "grid.n must be a power of two >= 8"});
  }
  if (where.count("grid.box_length") && !(c.box_length > 0.0 && std::isfinite(c.box_length))) {
    issues.push_back({at("grid.box_length"), "grid.box_length must be positive"});
  }
  if (where.count("electrons.count") && c.electron_count < 1) {
    issues.push_back({at("electrons.count"), "electrons.count must be at least 1"});
  }
  if (c.initial == InitialKind::gaussian_packets && where.count("electrons.count") &&
      c.orbitals.size() != c.electron_count) {
    issues.push_back({at("electrons.count"), "electrons.count = " + std::to_string(c.electron_count) + " but " +
                                                 std::to_string(c.orbitals.size()) + " [orbital] blocks given"});
  }
  if (c.initial == InitialKind::file && c.initial_file.empty()) {
    issues.push_back({at("electrons.initial"), "electrons.initial = file requires electrons.file"});
  }
  if (!(c.exchange.q > 1.0) || !std::isfinite(c.exchange.q)) {
    issues.push_back({at("exchange.q"), "exchange.q must satisfy q > 1"});
  }
  if (!std::isfinite(c.exchange.lambda)) issues.push_back({at("exchange.lambda"), "exchange.lambda must be finite"});
  if (where.count("softening.epsilon")) {
    if (!(c.exchange.epsilon >= 0.0) || !std::isfinite(c.exchange.epsilon)) {
      issues.push_back({at("softening.epsilon"), "softening.epsilon must be nonnegative"});
    }
  } else if (c.grid_n > 0 && c.box_length > 0.0) {
    c.exchange.epsilon = 2.0 * c.box_length / static_cast<double>(c.grid_n);
  }
  if (where.count("time.dt") && !(c.dt > 0.0 && std::isfinite(c.dt))) {
    issues.push_back({at("time.dt"), "time.dt must be positive"});
  }
  if (!(c.window_tau > 0.0) || !std::isfinite(c.window_tau)) {
    issues.push_back({at("time.window_tau"), "time.window_tau must be positive"});
  } else if (c.dt > 0.0 && !is_multiple(c.window_tau, c.dt)) {
    issues.push_back({at("time.window_tau"), "time.window_tau must be a positive multiple of time.dt"});
  }
  if (where.count("time.total")) {
    if (!(c.total > 0.0) || !std::isfinite(c.total)) {
      issues.push_back({at("time.total"), "time.total must be positive"});
    } else if (c.window_tau > 0.0 && !is_multiple(c.total, c.window_tau)) {
      issues.push_back({at("time.total"), "time.total must be a positive multiple of time.window_tau"});
    }
  }
  if (!(c.picard_tol > 0.0)) issues.push_back({at("picard.tol"), "picard.tol must be positive"});
  if (c.max_iters < 1) issues.push_back({at("picard.max_iters"), "picard.max_iters must be at least 1"});
  if (!(c.propagator_bound >= 1.0)) {
    issues.push_back({at("picard.propagator_bound"), "picard.propagator_bound must be at least 1"});
  }
  if (c.stride < 1) issues.push_back({at("output.stride"), "output.stride must be at least 1"});
  if (c.output_dir.empty()) issues.push_back({at("output.dir"), "output.dir must not be empty"});
  if (c.probe.samples < 2) issues.push_back({at("probe.samples"), "probe.samples must be at least 2"});
  if (c.probe.calibrate >= c.probe.samples) {
    issues.push_back({at("probe.calibrate"), "probe.calibrate must be below probe.samples"});
  }
  if (!(c.probe.margin >= 1.0)) issues.push_back({at("probe.margin"), "probe.margin must be at least 1"});
  if (c.probe.orbitals < 1) issues.push_back({at("probe.orbitals"), "probe.orbitals must be at least 1"});
  if (!(c.probe.radius > 0.0)) issues.push_back({at("probe.radius"), "probe.radius must be positive"});
  if (!(c.probe.lp >= 1.0)) issues.push_back({at("probe.lp"), "probe.lp must be at least 1"});
  for (double a : c.probe.alpha) {
    if (!(a >= 0.5)) issues.push_back({at("probe.alpha"), "probe.alpha entries must be >= 0.5"});
  }
  for (double b : c.probe.beta) {
    if (!(b >= 1.5)) issues.push_back({at("probe.beta"), "probe.beta entries must be >= 1.5"});
  }
  for (double m : c.probe.min_density) {
    if (!(m > 0.0)) issues.push_back({at("probe.min_density"), "probe.min_density entries must be positive"});
  }
  if (!(c.probe.p > 2.0)) issues.push_back({at("probe.p"), "probe.p must exceed 2"});
  if (c.probe.fields < 1) issues.push_back({at("probe.fields"), "probe.fields must be at least 1"});
  if (!(c.probe.dt > 0.0) || !std::isfinite(c.probe.dt)) {
    issues.push_back({at("probe.dt"), "probe.dt must be positive"});
  } else if (c.probe.thetas.size() < 2) {
    issues.push_back({at("probe.thetas"), "probe.thetas needs at least two window lengths"});
  } else if (!is_multiple(*std::max_element(c.probe.thetas.begin(), c.probe.thetas.end()), c.probe.dt)) {
    issues.push_back({at("probe.thetas"), "the largest probe.thetas entry must be a positive multiple of probe.dt"});
  }
  if (!(c.admissibility.tau_max > 0.0)) {
    issues.push_back({at("admissibility.tau_max"), "admissibility.tau_max must be positive"});
  }
  if (c.admissibility.delta && !(*c.admissibility.delta >= 0.0)) {
    issues.push_back({at("admissibility.delta"), "admissibility.delta must be nonnegative"});
  }
  if (c.admissibility.A && !(*c.admissibility.A > 1.0)) {
    issues.push_back({at("admissibility.A"), "admissibility.A must exceed 1"});
  }
  if (c.admissibility.C && !(*c.admissibility.C > 2.0)) {
    issues.push_back({at("admissibility.C"), "admissibility.C must exceed 2"});
  }
  for (std::size_t k = 0; k < c.nuclei.size(); ++k) {
    for (std::size_t l = k + 1; l < c.nuclei.size(); ++l) {
      if (c.nuclei.positions[k] == c.nuclei.positions[l]) {
        issues.push_back({blocks.empty() ? 0 : blocks.front().line,
                          "nuclei " + std::to_string(k) + " and " + std::to_string(l) + " coincide"});
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  kv("grid.n", std::to_string(c.grid_n));
  kv("grid.box_length", num(c.box_length));
  kv("electrons.count", std::to_string(c.electron_count));
  kv("electrons.initial", c.initial == InitialKind::file ? "file" : "gaussian_packets");
  if (!c.initial_file.empty()) kv("electrons.file", c.initial_file);
  kv("electrons.orthonormalize", c.orthonormalize ? "true" : "false");
  kv("exchange.lambda", num(c.exchange.lambda));
  kv("exchange.q", num(c.exchange.q));
  kv("hartree.enabled", c.hartree ? "true" : "false");
  kv("softening.epsilon", num(c.exchange.epsilon));
  kv("time.dt", num(c.dt));
  kv("time.window_tau", num(c.window_tau));
  kv("time.total", num(c.total));
  kv("picard.tol", num(c.picard_tol));
  kv("picard.max_iters", std::to_string(c.max_iters));
  kv("picard.propagator_bound", num(c.propagator_bound));
  kv("forces.convention", to_string(c.convention));
  kv("seed", std::to_string(c.seed));
  kv("output.dir", c.output_dir);
  kv("output.stride", std::to_string(c.stride));
  kv("output.checkpoints", c.checkpoints ? "true" : "false");
  kv("probe.samples", std::to_string(c.probe.samples));
  kv("probe.calibrate", std::to_string(c.probe.calibrate));
  kv("probe.margin", num(c.probe.margin));
  kv("probe.orbitals", std::to_string(c.probe.orbitals));
  kv("probe.radius", num(c.probe.radius));
  kv("probe.lp", num(c.probe.lp));
  kv("probe.alpha", list(c.probe.alpha));
  kv("probe.beta", list(c.probe.beta));
  kv("probe.min_density", list(c.probe.min_density));
  kv("probe.perturbation", num(c.probe.perturbation));
  kv("probe.fields", std::to_string(c.probe.fields));
  kv("probe.thetas", list(c.probe.thetas));
  kv("probe.dt", num(c.probe.dt));
  kv("probe.p", num(c.probe.p));
  kv("probe.sizes", list(c.probe.sizes));
  kv("admissibility.tau_max", num(c.admissibility.tau_max));
  const auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) kv(k, num(*v));
  };
  opt("admissibility.delta", c.admissibility.delta);
  opt("admissibility.A", c.admissibility.A);
  opt("admissibility.C", c.admissibility.C);
  opt("admissibility.C1", c.admissibility.C1);
  opt("admissibility.C2", c.admissibility.C2);
  opt("admissibility.lipschitz_scale", c.admissibility.lipschitz_scale);
  for (std::size_t k = 0; k < c.nuclei.size(); ++k) {
    os << "\n[nucleus]\n";
    kv("mass", num(c.nuclei.masses[k]));
    kv("charge", std::to_string(c.nuclei.charges[k]));
    kv("position", vec(c.nuclei.positions[k]));
    kv("velocity", vec(c.nuclei.velocities[k]));
  }
  for (const auto& o : c.orbitals) {
    os << "\n[orbital]\n";
    kv("center", vec(o.center));
    kv("width", num(o.width));
    kv("momentum", vec(o.momentum));
  }
  return os.str();
}

}  // namespace ksnd::cli
