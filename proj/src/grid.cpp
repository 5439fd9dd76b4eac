#include "tve/grid.hpp"

#include <sstream>

namespace tve {

Grid::Grid(std::array<double, 3> lengths, std::array<int, 3> cells) : lengths_(lengths), n_(cells) {
  for (int d = 0; d < 3; ++d) {
    if (!(lengths_[d] > 0.0)) {
      std::ostringstream os;
      os << "grid extent along direction " << d << " must be positive";
      throw std::invalid_argument(os.str());
    }
    if (n_[d] < 1 || (n_[d] > 1 && n_[d] < 4)) {
      std::ostringstream os;
      os << "grid direction " << d << " has " << n_[d]
         << " cells; active directions need at least 4 for the second-gradient stencil";
      throw std::invalid_argument(os.str());
    }
    h_[d] = lengths_[d] / n_[d];
  }
}

std::size_t Grid::reflect(CellIndex c, unsigned& mask) const {
  mask = 0;
  for (int d = 0; d < 3; ++d) {
    if (!active(d)) {
      c[d] = 0;
      continue;
    }
    int x = c[d];
    const int n = n_[d];
    while (x < 0 || x >= n) {
      x = x < 0 ? -1 - x : 2 * n - 1 - x;
      mask ^= 1u << d;
    }
    c[d] = x;
  }
  return index(c);
}

std::vector<BoundaryPatch> boundary_patches(const Grid& g) {
  std::vector<BoundaryPatch> out;
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    for (int side = 0; side < 2; ++side) {
      BoundaryPatch bp;
      bp.face = static_cast<Face>(2 * d + side);
      bp.direction = d;
      bp.normal[d] = side == 0 ? -1.0 : 1.0;
      const int layer = side == 0 ? 0 : g.n(d) - 1;
      for (std::size_t n = 0; n < g.size(); ++n)
        if (g.cell(n)[d] == layer) bp.cells.push_back(n);
      out.push_back(std::move(bp));
    }
  }
  return out;
}

double hyperstress_pairing(const Grid& g, const Field<Vec3d>& v, const Field<Vec3d>& w, double mu,
                           double p) {
  if (mu < 0.0) throw DomainError("hyperstress_pairing: mu must be non-negative");
  if (mu == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CellIndex c = g.cell(n);
    const Third3d hv = second_gradient_at(g, v, c);
    const Third3d hw = second_gradient_at(g, w, c);
    const double nv = triple_contraction(hv, hv);
    s += mu * std::pow(nv, 0.5 * (p - 2.0)) * triple_contraction(hv, hw);
  }
  return s * g.cell_volume();
}

double surface_integrate(const Grid& g, const std::function<double(Face, std::size_t)>& fn) {
  double s = 0.0;
  for (const BoundaryPatch& bp : boundary_patches(g)) {
    const double a = g.face_area(bp.direction);
    for (std::size_t n : bp.cells) s += fn(bp.face, n) * a;
  }
  return s;
}

}  // namespace tve
