#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latticeforge/geometry.hpp"

namespace latticeforge {

// Interior slice positions s * edge / (n_s + 1), s = 1..n_s.
std::vector<double> slice_positions(int n_s, double edge);

// Load-bearing cross section of one slice: bars strictly straddling the
// plane contribute area * cos^2 of their angle to the slicing axis. Bars
// with an endpoint exactly on the plane do not straddle it.
double effective_slice_area(const Lattice& lat, int axis, double pos);

// All slice areas, 3 * n_s values: the x block, then y, then z.
Eigen::VectorXd slice_areas(const Lattice& lat, int n_s);

struct InverseAreas {
  Eigen::VectorXd inv;
  bool zero_area = false;  // some slice carried no bar; inverse was capped
};

// Elementwise reciprocal with a floor: areas below 1e-12 m^2 map to 1e12
// and set the zero_area flag.
InverseAreas inverse_areas(const Eigen::VectorXd& areas);

// Equivalent axial stiffness of n sections in series: n / sum(1 / ea_i).
double series_equivalent_ea(const Eigen::VectorXd& ea);

}  // namespace latticeforge
