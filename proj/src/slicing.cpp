#include "latticeforge/slicing.hpp"

namespace latticeforge {

std::vector<double> slice_positions(int n_s, double edge) {
  if (n_s < 1) throw EmptyRange("slice count must be positive");
  std::vector<double> pos(n_s);
  for (int s = 1; s <= n_s; ++s) {
    pos[s - 1] = edge * static_cast<double>(s) / (n_s + 1);
  }
  return pos;
}

double effective_slice_area(const Lattice& lat, int axis, double pos) {
  if (axis < 0 || axis > 2) throw DimensionMismatch("axis must be 0, 1 or 2");
  double area = 0.0;
  for (int e = 0; e < lat.n_edges(); ++e) {
    const double a = lat.nodes[lat.edges[e].first](axis);
    const double b = lat.nodes[lat.edges[e].second](axis);
    const bool straddles = (a < pos && b > pos) || (a > pos && b < pos);
    if (!straddles) continue;
    const double c = lat.edge_direction(e)(axis);
    area += lat.section.area * c * c;
  }
  return area;
}

Eigen::VectorXd slice_areas(const Lattice& lat, int n_s) {
  const std::vector<double> pos = slice_positions(n_s, lat.domain_edge);
  Eigen::VectorXd out(3 * n_s);
  for (int axis = 0; axis < 3; ++axis) {
    for (int s = 0; s < n_s; ++s) {
      out(axis * n_s + s) = effective_slice_area(lat, axis, pos[s]);
    }
  }
  return out;
}

InverseAreas inverse_areas(const Eigen::VectorXd& areas) {
  InverseAreas r;
  r.inv.resize(areas.size());
  for (Eigen::Index i = 0; i < areas.size(); ++i) {
    if (areas(i) < 1e-12) {
      r.inv(i) = 1e12;
      r.zero_area = true;
    } else {
      r.inv(i) = 1.0 / areas(i);
    }
  }
  return r;
}

double series_equivalent_ea(const Eigen::VectorXd& ea) {
  if (ea.size() == 0) throw EmptyRange("empty series");
  double inv_sum = 0.0;
  for (Eigen::Index i = 0; i < ea.size(); ++i) {
    if (!(ea(i) > 0.0)) throw DegenerateInput("nonpositive section stiffness");
    inv_sum += 1.0 / ea(i);
  }
  return static_cast<double>(ea.size()) / inv_sum;
}

}  // namespace latticeforge
