#include "tve/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tve {

namespace {

void put(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_csv(const std::vector<LedgerRow>& rows) {
  std::string out;
  const auto& cols = ledger_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const LedgerRow& r : rows) {
    const std::vector<double> v = ledger_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      put(out, v[i]);
    }
    out += "\n";
  }
  return out;
}

void write_csv(const std::vector<LedgerRow>& rows, const std::string& path) { write_text(format_csv(rows), path); }

std::string format_vtk(const Grid& g, const State& s) {
  std::string out = "# vtk DataFile Version 3.0\n";
  out += "tve state t=";
  put(out, s.t);
  out += "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + std::to_string(g.n(0)) + " " + std::to_string(g.n(1)) + " " + std::to_string(g.n(2)) + "\n";
  out += "ORIGIN";
  for (int d = 0; d < 3; ++d) {
    out += " ";
    put(out, 0.5 * g.h(d));
  }
  out += "\nSPACING";
  for (int d = 0; d < 3; ++d) {
    out += " ";
    put(out, g.h(d));
  }
  out += "\nPOINT_DATA " + std::to_string(g.size()) + "\n";
  out += "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    put(out, s.rho[n]);
    out += "\n";
  }
  out += "VECTORS v double\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int i = 0; i < 3; ++i) {
      if (i) out += " ";
      put(out, s.v[n][i]);
    }
    out += "\n";
  }
  out += "SCALARS theta double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    put(out, s.theta[n]);
    out += "\n";
  }
  out += "FIELD FieldData 1\nE 6 " + std::to_string(g.size()) + " double\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int q = 0; q < 6; ++q) {
      if (q) out += " ";
      put(out, s.E[n].c[q]);
    }
    out += "\n";
  }
  return out;
}

void write_vtk(const Grid& g, const State& s, const std::string& path) { write_text(format_vtk(g, s), path); }

VtkState parse_vtk(const std::string& text) {
  std::istringstream in(text);
  auto fail = [](const std::string& m) { throw std::runtime_error("VTK: " + m); };
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) fail("missing header");
  std::string title;
  std::getline(in, title);
  double t = 0.0;
  if (const auto pos = title.find("t="); pos != std::string::npos) t = std::stod(title.substr(pos + 2));
  std::string word;
  std::array<int, 3> dims{};
  std::array<double, 3> spacing{};
  std::size_t count = 0;
  in >> word;
  if (word != "ASCII") fail("only ASCII files are supported");
  in >> word >> word;
  if (word != "STRUCTURED_POINTS") fail("expected STRUCTURED_POINTS");
  VtkState out;
  bool have_rho = false, have_v = false, have_theta = false, have_E = false;
  while (in >> word) {
    if (word == "DIMENSIONS") {
      in >> dims[0] >> dims[1] >> dims[2];
    } else if (word == "ORIGIN") {
      double o;
      in >> o >> o >> o;
    } else if (word == "SPACING") {
      in >> spacing[0] >> spacing[1] >> spacing[2];
    } else if (word == "POINT_DATA") {
      in >> count;
      const std::array<double, 3> L{dims[0] * spacing[0], dims[1] * spacing[1], dims[2] * spacing[2]};
      out.grid = Grid(L, dims);
      if (out.grid.size() != count) fail("POINT_DATA count does not match DIMENSIONS");
      out.state = State(out.grid);
      out.state.t = t;
    } else if (word == "SCALARS") {
      std::string name, type, lut;
      int comps = 1;
      in >> name >> type >> comps >> lut >> lut;
      if (comps != 1) fail("unexpected component count for " + name);
      Field<double>* f = name == "rho" ? &out.state.rho : name == "theta" ? &out.state.theta : nullptr;
      if (!f) fail("unknown scalar array " + name);
      for (std::size_t n = 0; n < count; ++n) in >> (*f)[n];
      (name == "rho" ? have_rho : have_theta) = true;
    } else if (word == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      if (name != "v") fail("unknown vector array " + name);
      for (std::size_t n = 0; n < count; ++n) in >> out.state.v[n][0] >> out.state.v[n][1] >> out.state.v[n][2];
      have_v = true;
    } else if (word == "FIELD") {
      std::string name;
      int arrays = 0;
      in >> name >> arrays;
      for (int a = 0; a < arrays; ++a) {
        std::string aname, type;
        int comps = 0;
        std::size_t tuples = 0;
        in >> aname >> comps >> tuples >> type;
        if (aname != "E" || comps != 6 || tuples != count) fail("unexpected field array " + aname);
        for (std::size_t n = 0; n < count; ++n)
          for (int q = 0; q < 6; ++q) in >> out.state.E[n].c[q];
        have_E = true;
      }
    } else {
      fail("unexpected keyword " + word);
    }
    if (in.fail()) fail("malformed data near " + word);
  }
  if (!(have_rho && have_v && have_theta && have_E)) fail("missing one of the arrays rho, v, theta, E");
  return out;
}

VtkState read_vtk(const std::string& path) { return parse_vtk(read_text(path)); }

}  // namespace tve
