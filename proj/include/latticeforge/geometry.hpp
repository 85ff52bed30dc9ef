#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "latticeforge/common.hpp"

namespace latticeforge {

using Vec3 = Eigen::Vector3d;

// Circular cross section; the moments are derived from the radius.
struct SectionSpec {
  double radius = 0.0;     // m
  double area = 0.0;       // m^2
  double i_bend = 0.0;     // m^4, both principal axes (circular symmetry)
  double j_torsion = 0.0;  // m^4

  static SectionSpec circular(double radius);
  bool consistent(double rel_tol = 1e-12) const;
};

struct MaterialSpec {
  double young_modulus = 0.0;  // Pa
  double poisson_ratio = 0.3;  // used only by the beam model

  bool valid() const {
    return young_modulus > 0.0 && poisson_ratio >= 0.0 && poisson_ratio < 0.5;
  }
  double shear_modulus() const {
    return young_modulus / (2.0 * (1.0 + poisson_ratio));
  }
};

struct GenConfig {
  int n_free = 1;            // interior joints
  double epsilon = 0.05;     // margin keeping joints off the boundary
  std::uint64_t seed = 0;
  double domain_edge = 1.0;  // m

  bool valid() const {
    return n_free >= 0 && epsilon > 0.0 && epsilon < 0.5 && domain_edge > 0.0;
  }
};

using Edge = std::pair<int, int>;  // (i, j) with i < j

struct Lattice {
  std::vector<Vec3> nodes;  // nodes 0..7 are the cube corners, binary order
  std::vector<Edge> edges;
  SectionSpec section;
  MaterialSpec material;
  double domain_edge = 1.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  double edge_length(int e) const {
    return (nodes[edges[e].second] - nodes[edges[e].first]).norm();
  }
  Vec3 edge_direction(int e) const {
    return (nodes[edges[e].second] - nodes[edges[e].first]).normalized();
  }
  bool connected() const;
};

// Cube corners in binary order, x fastest:
// (0,0,0),(1,0,0),(0,1,0),(1,1,0),(0,0,1),(1,0,1),(0,1,1),(1,1,1).
// Bottom face = corners 0..3, top face = corners 4..7.
std::array<Vec3, 8> cube_corners(double edge);

}  // namespace latticeforge
