#include "tve/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "tve/scenario.hpp"

namespace tve {

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                        message
                                  : message),
      line_(line),
      column_(column) {}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const StepConfig &s = a.step, &t = b.step;
  return a.grid == b.grid && a.material == b.material && a.dissipation == b.dissipation && a.heat == b.heat &&
         a.gravity == b.gravity && a.scenario == b.scenario && a.t_end == b.t_end &&
         a.exponent_override == b.exponent_override && a.output == b.output && s.tau == t.tau &&
         s.newton_tol == t.newton_tol && s.max_newton == t.max_newton && s.halving_cap == t.halving_cap &&
         s.delta == t.delta && s.rho_exponent == t.rho_exponent && s.epsilon == t.epsilon &&
         s.strain_exponent == t.strain_exponent && s.advection == t.advection && s.mode == t.mode &&
         s.lambda == t.lambda && s.threads == t.threads;
}

namespace {

struct BadValue {
  std::string what;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw BadValue{"expected a finite number, got '" + v + "'"};
  return x;
}

int to_int(const std::string& v) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw BadValue{"expected an integer, got '" + v + "'"};
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real(std::string sec, std::string name, double RunConfig::*member) {
  return {std::move(sec), std::move(name), [member](RunConfig& c, const std::string& v) { c.*member = to_double(v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

template <class Fn>
Key real_ref(std::string sec, std::string name, Fn ref) {
  return {std::move(sec), std::move(name), [ref](RunConfig& c, const std::string& v) { ref(c) = to_double(v); },
          [ref](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); }};
}

template <class Fn>
Key int_ref(std::string sec, std::string name, Fn ref) {
  return {std::move(sec), std::move(name), [ref](RunConfig& c, const std::string& v) { ref(c) = to_int(v); },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <class Fn>
Key bool_ref(std::string sec, std::string name, Fn ref) {
  return {std::move(sec), std::move(name), [ref](RunConfig& c, const std::string& v) { ref(c) = to_bool(v); },
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class Fn>
Key string_ref(std::string sec, std::string name, Fn ref) {
  return {std::move(sec), std::move(name),
          [ref](RunConfig& c, const std::string& v) {
            if (v.empty()) throw BadValue{"expected a non-empty value"};
            ref(c) = v;
          },
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

const char* const kFaceNames[6] = {"xminus", "xplus", "yminus", "yplus", "zminus", "zplus"};
const char* const kAxes[3] = {"x", "y", "z"};
const char* const kVoigt[6] = {"e11", "e22", "e33", "e23", "e13", "e12"};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    for (int d = 0; d < 3; ++d) {
      k.push_back(real_ref("grid", std::string("l") + kAxes[d], [d](RunConfig& c) -> double& { return c.grid.lengths[d]; }));
      k.push_back(int_ref("grid", std::string("n") + kAxes[d], [d](RunConfig& c) -> int& { return c.grid.cells[d]; }));
    }
    k.push_back(real_ref("material", "bulk_modulus", [](RunConfig& c) -> double& { return c.material.bulk_modulus; }));
    k.push_back(real_ref("material", "shear_modulus", [](RunConfig& c) -> double& { return c.material.shear_modulus; }));
    k.push_back(real_ref("material", "expansion", [](RunConfig& c) -> double& { return c.material.expansion; }));
    k.push_back(real_ref("material", "heat_capacity", [](RunConfig& c) -> double& { return c.material.heat_capacity; }));
    k.push_back(real_ref("material", "exponent.alpha", [](RunConfig& c) -> double& { return c.material.alpha; }));
    k.push_back(
        real_ref("material", "maxwell_modulus", [](RunConfig& c) -> double& { return c.material.maxwell_modulus; }));
    k.push_back(real_ref("material", "maxwell_activation",
                         [](RunConfig& c) -> double& { return c.material.maxwell_activation; }));
    k.push_back(bool_ref("material", "creep", [](RunConfig& c) -> bool& { return c.material.creep; }));

    k.push_back(real_ref("dissipation", "shear_viscosity",
                         [](RunConfig& c) -> double& { return c.dissipation.shear_viscosity; }));
    k.push_back(
        real_ref("dissipation", "bulk_viscosity", [](RunConfig& c) -> double& { return c.dissipation.bulk_viscosity; }));
    k.push_back(real_ref("dissipation", "hyper_mu", [](RunConfig& c) -> double& { return c.dissipation.hyper_mu; }));
    k.push_back(real_ref("dissipation", "exponent.p", [](RunConfig& c) -> double& { return c.dissipation.p; }));

    k.push_back(real_ref("heat", "kappa0", [](RunConfig& c) -> double& { return c.heat.kappa0; }));
    k.push_back(real_ref("heat", "exponent.beta", [](RunConfig& c) -> double& { return c.heat.beta; }));
    k.push_back(real_ref("heat", "a1", [](RunConfig& c) -> double& { return c.heat.a1; }));
    k.push_back(real_ref("heat", "a2", [](RunConfig& c) -> double& { return c.heat.a2; }));
    for (int f = 0; f < 6; ++f)
      k.push_back(real_ref("heat", std::string("h_ext.") + kFaceNames[f],
                           [f](RunConfig& c) -> double& { return c.heat.h_ext[f]; }));
    k.push_back(real_ref("heat", "source", [](RunConfig& c) -> double& { return c.heat.source; }));

    for (int d = 0; d < 3; ++d)
      k.push_back(real_ref("loading", std::string("g") + kAxes[d], [d](RunConfig& c) -> double& { return c.gravity[d]; }));

    k.push_back(string_ref("scenario", "name", [](RunConfig& c) -> std::string& { return c.scenario.name; }));
    k.push_back(real_ref("scenario", "rho0", [](RunConfig& c) -> double& { return c.scenario.rho0; }));
    k.push_back(real_ref("scenario", "theta0", [](RunConfig& c) -> double& { return c.scenario.theta0; }));
    k.push_back(real_ref("scenario", "amplitude", [](RunConfig& c) -> double& { return c.scenario.amplitude; }));
    k.push_back(real_ref("scenario", "width", [](RunConfig& c) -> double& { return c.scenario.width; }));
    k.push_back(real_ref("scenario", "omega", [](RunConfig& c) -> double& { return c.scenario.omega; }));
    k.push_back(real_ref("scenario", "wavenumber", [](RunConfig& c) -> double& { return c.scenario.wavenumber; }));
    for (int q = 0; q < 6; ++q)
      k.push_back(real_ref("scenario", kVoigt[q], [q](RunConfig& c) -> double& { return c.scenario.strain.c[q]; }));
    k.push_back(real_ref("scenario", "core_radius", [](RunConfig& c) -> double& { return c.scenario.core_radius; }));
    k.push_back(real_ref("scenario", "outer_radius", [](RunConfig& c) -> double& { return c.scenario.outer_radius; }));
    k.push_back(
        real_ref("scenario", "support_radius", [](RunConfig& c) -> double& { return c.scenario.support_radius; }));

    k.push_back(real_ref("time", "tau", [](RunConfig& c) -> double& { return c.step.tau; }));
    k.push_back(real("time", "t_end", &RunConfig::t_end));

    k.push_back(real_ref("solver", "newton_tol", [](RunConfig& c) -> double& { return c.step.newton_tol; }));
    k.push_back(int_ref("solver", "max_newton", [](RunConfig& c) -> int& { return c.step.max_newton; }));
    k.push_back(int_ref("solver", "halving_cap", [](RunConfig& c) -> int& { return c.step.halving_cap; }));
    k.push_back({"solver", "mode",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "monolithic") c.step.mode = SolverMode::Monolithic;
                   else if (v == "staggered") c.step.mode = SolverMode::Staggered;
                   else throw BadValue{"expected monolithic or staggered, got '" + v + "'"};
                 },
                 [](const RunConfig& c) {
                   return std::string(c.step.mode == SolverMode::Monolithic ? "monolithic" : "staggered");
                 }});
    k.push_back({"solver", "advection",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "central") c.step.advection = AdvectionMode::Central;
                   else if (v == "upwind") c.step.advection = AdvectionMode::Upwind;
                   else throw BadValue{"expected central or upwind, got '" + v + "'"};
                 },
                 [](const RunConfig& c) {
                   return std::string(c.step.advection == AdvectionMode::Central ? "central" : "upwind");
                 }});
    k.push_back(int_ref("solver", "threads", [](RunConfig& c) -> int& { return c.step.threads; }));

    k.push_back(real_ref("stabilizers", "delta", [](RunConfig& c) -> double& { return c.step.delta; }));
    k.push_back(real_ref("stabilizers", "exponent.r", [](RunConfig& c) -> double& { return c.step.rho_exponent; }));
    k.push_back(real_ref("stabilizers", "epsilon", [](RunConfig& c) -> double& { return c.step.epsilon; }));
    k.push_back(real_ref("stabilizers", "exponent.s", [](RunConfig& c) -> double& { return c.step.strain_exponent; }));

    k.push_back(real_ref("entropy", "lambda", [](RunConfig& c) -> double& { return c.step.lambda; }));
    k.push_back(bool_ref("entropy", "override", [](RunConfig& c) -> bool& { return c.exponent_override; }));

    k.push_back(string_ref("output", "dir", [](RunConfig& c) -> std::string& { return c.output.dir; }));
    k.push_back(string_ref("output", "csv", [](RunConfig& c) -> std::string& { return c.output.csv; }));
    k.push_back(int_ref("output", "vtk_every", [](RunConfig& c) -> int& { return c.output.vtk_every; }));
    return k;
  }();
  return table;
}

struct Entry {
  std::string section, key, value;
  int line = 0, key_col = 0, value_col = 0;
};

std::vector<Entry> tokenize(const std::string& text) {
  std::set<std::string> sections;
  for (const Key& k : keys()) sections.insert(k.section);
  std::vector<Entry> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const int col = static_cast<int>(first) + 1;
    if (s[first] == '[') {
      const auto close = s.find(']', first);
      if (close == std::string::npos) throw ConfigError("missing ']' in section header", line, static_cast<int>(s.size()) + 1);
      if (!trim(s.substr(close + 1)).empty())
        throw ConfigError("unexpected text after section header", line, static_cast<int>(close) + 2);
      section = trim(s.substr(first + 1, close - first - 1));
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line, col + 1);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, col);
    if (section.empty()) throw ConfigError("key outside of any [section]", line, col);
    Entry e;
    e.section = section;
    e.key = trim(s.substr(first, eq - first));
    e.value = trim(s.substr(eq + 1));
    e.line = line;
    e.key_col = col;
    const auto vpos = s.find_first_not_of(" \t", eq + 1);
    e.value_col = static_cast<int>(vpos == std::string::npos ? eq + 1 : vpos) + 1;
    if (e.key.empty()) throw ConfigError("empty key", line, col);
    if (!seen.insert(section + "." + e.key).second)
      throw ConfigError("duplicate key '" + e.key + "' in [" + section + "]", line, col);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  try {
    Grid g(c.grid.lengths, c.grid.cells);
  } catch (const std::invalid_argument& e) {
    fail(std::string("grid: ") + e.what());
  }
  ThermoCreepMaterial tm;
  tm.bulk_modulus = c.material.bulk_modulus;
  tm.shear_modulus = c.material.shear_modulus;
  tm.expansion = c.material.expansion;
  tm.heat_capacity = c.material.heat_capacity;
  tm.alpha = c.material.alpha;
  tm.maxwell_modulus = c.material.maxwell_modulus;
  tm.maxwell_activation = c.material.maxwell_activation;
  try {
    tm.validate();
  } catch (const DomainError& e) {
    fail(std::string("material: ") + e.what());
  }
  const DissipationSpec& d = c.dissipation;
  if (!(d.shear_viscosity >= 0.0) || !(d.bulk_viscosity >= 0.0))
    fail("dissipation: the viscosity tensor must be positive semi-definite (viscosities >= 0)");
  if (!(d.hyper_mu > 0.0)) fail("dissipation: hyper-viscosity coefficient mu must be positive");
  if (!(d.p > 3.0)) fail("dissipation: hyper-viscosity exponent p must exceed 3");
  const HeatSpec& h = c.heat;
  if (!(h.kappa0 > 0.0)) fail("heat: conductivity coefficient kappa0 must be positive");
  if (!(h.a1 >= 0.0) || !(h.a2 >= 0.0)) fail("heat: boundary out-flux coefficients a1, a2 must be non-negative");
  for (double x : h.h_ext)
    if (!(x >= 0.0)) fail("heat: external boundary heat flux h_ext must be non-negative");
  if (!(h.source >= 0.0)) fail("heat: bulk heat source must be non-negative");
  const double lambda = c.step.lambda;
  if (!(lambda >= 0.0 && lambda < 1.0 + c.material.alpha))
    fail("entropy: lambda must satisfy 0 <= lambda < 1 + alpha");
  const ExponentCheck ex = admissible_exponents(c.material.alpha, h.beta, lambda);
  if (!ex.admissible && !c.exponent_override) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "exponents (alpha, beta, lambda) = (%g, %g, %g) are not admissible: ", c.material.alpha,
                  h.beta, lambda);
    fail(std::string(buf) + ex.reason + " (set [entropy] override = true to run anyway)");
  }
  try {
    c.step.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("solver: ") + e.what());
  }
  if (!(c.t_end >= 0.0)) fail("time: t_end must be non-negative");
  if (!(c.scenario.rho0 > 0.0)) fail("scenario: initial density rho0 must be positive");
  if (!(c.scenario.theta0 > 0.0)) fail("scenario: initial temperature theta0 must be positive");
  if (c.output.vtk_every < 0) fail("output: vtk_every must be non-negative");
}

RunConfig parse_config(const std::string& text) {
  const std::vector<Entry> entries = tokenize(text);
  RunConfig cfg;
  for (const Entry& e : entries)
    if (e.section == "scenario" && e.key == "name") {
      try {
        cfg = scenario_defaults(e.value);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what(), e.line, e.value_col);
      }
    }
  for (const Entry& e : entries) {
    const Key* key = nullptr;
    for (const Key& k : keys())
      if (k.section == e.section && k.name == e.key) key = &k;
    if (!key) throw ConfigError("unknown key '" + e.key + "' in [" + e.section + "]", e.line, e.key_col);
    try {
      key->set(cfg, e.value);
    } catch (const BadValue& bad) {
      throw ConfigError(e.section + "." + e.key + ": " + bad.what, e.line, e.value_col);
    }
  }
  validate_config(cfg);
  return cfg;
}

std::string dump_config(const RunConfig& cfg) {
  std::string out, section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace tve
