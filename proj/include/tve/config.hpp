// Run configuration: INI-style text with [section] headers and key = value
// lines. Unknown sections or keys are errors; omitted keys take the defaults
// of the selected scenario.
#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "tve/state.hpp"

namespace tve {

class ConfigError : public std::runtime_error {
 public:
  /// line and column are 1-based; 0 when the error is not tied to a position.
  ConfigError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_ = 0;
  int column_ = 0;
};

struct GridSpec {
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  std::array<int, 3> cells{8, 8, 1};
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct MaterialSpec {
  double bulk_modulus = 1.0;
  double shear_modulus = 1.0;
  double expansion = 0.0;
  double heat_capacity = 1.0;
  double alpha = 1.0;
  double maxwell_modulus = 1.0;
  double maxwell_activation = 0.0;
  bool creep = true;
  friend bool operator==(const MaterialSpec&, const MaterialSpec&) = default;
};

struct DissipationSpec {
  double shear_viscosity = 0.1;
  double bulk_viscosity = 0.1;
  double hyper_mu = 1e-4;
  double p = 4.0;
  friend bool operator==(const DissipationSpec&, const DissipationSpec&) = default;
};

struct HeatSpec {
  double kappa0 = 0.01;
  double beta = 1.5;
  double a1 = 0.0;
  double a2 = 0.0;
  std::array<double, 6> h_ext{};  // -x, +x, -y, +y, -z, +z
  double source = 0.0;
  friend bool operator==(const HeatSpec&, const HeatSpec&) = default;
};

/// Initial-condition selector and its parameters. Which parameters a
/// scenario reads is listed in scenario.hpp.
struct ScenarioSpec {
  std::string name = "rest_equilibrium";
  double rho0 = 1.0;
  double theta0 = 1.0;
  double amplitude = 0.0;
  double width = 0.15;
  double omega = 1.0;
  double wavenumber = 1.0;
  Sym3d strain;  // E0
  double core_radius = 0.3;
  double outer_radius = 0.48;
  double support_radius = 0.25;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct OutputSpec {
  std::string dir = "out";
  std::string csv = "ledger.csv";
  int vtk_every = 0;  // 0 disables VTK output
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  GridSpec grid;
  MaterialSpec material;
  DissipationSpec dissipation;
  HeatSpec heat;
  Vec3d gravity;
  ScenarioSpec scenario;
  double t_end = 1.0;
  StepConfig step;  // tau, solver, stabilizers and lambda
  bool exponent_override = false;
  OutputSpec output;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Parses and validates. Throws ConfigError.
RunConfig parse_config(const std::string& text);

/// Every key with full precision; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

/// Physical and numerical admissibility; throws ConfigError naming the
/// violated assumption. Inadmissible (alpha, beta, lambda) is accepted when
/// exponent_override is set.
void validate_config(const RunConfig& cfg);

/// Reads a file and parses it; I/O failures are reported as ConfigError.
RunConfig load_config(const std::string& path);

}  // namespace tve
