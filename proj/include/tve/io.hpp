// Ledger CSV and legacy ASCII VTK output. Numbers are printed with 17
// significant digits, so output is bit-reproducible and reloads exactly.
#pragma once

#include <string>
#include <vector>

#include "tve/diagnostics.hpp"
#include "tve/state.hpp"

namespace tve {

std::string format_csv(const std::vector<LedgerRow>& rows);
/// Throws std::runtime_error on I/O failure.
void write_csv(const std::vector<LedgerRow>& rows, const std::string& path);

/// STRUCTURED_POINTS with cell centres as points; point data rho, v
/// (VECTORS), theta, and E as a 6-component field in the order
/// 11, 22, 33, 23, 13, 12.
std::string format_vtk(const Grid& g, const State& s);
void write_vtk(const Grid& g, const State& s, const std::string& path);

struct VtkState {
  Grid grid;
  State state;
};

/// Reads files produced by write_vtk. Throws std::runtime_error.
VtkState read_vtk(const std::string& path);
VtkState parse_vtk(const std::string& text);

}  // namespace tve
