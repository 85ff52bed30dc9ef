#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "latticeforge/geometry.hpp"

namespace latticeforge {

enum class ElementModel { kTruss, kBeam };

inline int dofs_per_node(ElementModel m) {
  return m == ElementModel::kTruss ? 3 : 6;
}

// Axial-only 6x6 stiffness in element-local coordinates (x along the bar).
Eigen::Matrix<double, 6, 6> truss_local_stiffness(double ea, double len);

// Euler-Bernoulli 12x12 stiffness in element-local coordinates: axial,
// torsional and two bending planes, no shear deformation.
Eigen::Matrix<double, 12, 12> beam_local_stiffness(const SectionSpec& sec,
                                                   const MaterialSpec& mat,
                                                   double len);

// Rows are the element-local axes expressed in global coordinates, so the
// matrix maps global displacements to local ones. Local x follows dir; local
// y is horizontal except for near-vertical bars, which fall back to the
// global x axis as reference.
Eigen::Matrix3d element_rotation(const Vec3& dir);

Eigen::MatrixXd element_global_stiffness(const Lattice& lat, int e,
                                         ElementModel model);

Eigen::MatrixXd assemble(const Lattice& lat, ElementModel model);

// Prescribed displacement per constrained DOF, as (dof index, value) pairs.
using Prescribed = std::vector<std::pair<int, double>>;

// Uniaxial compression along z: corners keep u_x = u_y = 0, the bottom four
// corners keep u_z = 0, the top four get u_z = u_star; the beam model also
// clamps all corner rotations. Interior joints stay free.
Prescribed uniaxial_bcs(const Lattice& lat, ElementModel model, double u_star);

struct StaticSolution {
  Eigen::VectorXd u;          // full displacement vector
  Eigen::VectorXd f;          // K u; reactions on constrained DOFs
  double work_reactions = 0;  // sum of f * u over constrained DOFs
  double work_quadratic = 0;  // u' K u
};

// Static condensation onto the free DOFs; throws SingularSystem when the
// free-free block is rank deficient (mechanisms, isolated parts).
StaticSolution solve_condensed(const Eigen::MatrixXd& k,
                               const Prescribed& prescribed);

// Energy-equivalent modulus of a cube of edge length under uniaxial
// displacement u_star: E = W * edge / (u_star^2 * edge^2).
double effective_modulus(double work, double edge, double u_star);

// Total material volume, sum of area * length over the bars.
double lattice_volume(const Lattice& lat);

struct UniaxialResult {
  double e_eq = 0;   // Pa
  double volume = 0; // m^3
  double u_star = 0;
  StaticSolution sol;
};

// Full pipeline: assemble, apply uniaxial BCs, solve, convert work to the
// equivalent modulus. u_star <= 0 selects the default 1e-3 * edge.
UniaxialResult solve_lattice(const Lattice& lat, ElementModel model,
                             double u_star = 0.0);

}  // namespace latticeforge
