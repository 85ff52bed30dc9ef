#include "latticeforge/mechanics.hpp"

#include <cmath>

namespace latticeforge {

Eigen::Matrix<double, 6, 6> truss_local_stiffness(double ea, double len) {
  if (!(len > 0.0)) throw DegenerateInput("zero length bar");
  Eigen::Matrix<double, 6, 6> k = Eigen::Matrix<double, 6, 6>::Zero();
  const double s = ea / len;
  k(0, 0) = s;
  k(0, 3) = -s;
  k(3, 0) = -s;
  k(3, 3) = s;
  return k;
}

Eigen::Matrix<double, 12, 12> beam_local_stiffness(const SectionSpec& sec,
                                                   const MaterialSpec& mat,
                                                   double len) {
  if (!(len > 0.0)) throw DegenerateInput("zero length bar");
  const double l = len;
  const double l2 = l * l;
  const double l3 = l2 * l;
  const double ea = mat.young_modulus * sec.area;
  const double gj = mat.shear_modulus() * sec.j_torsion;
  const double eiy = mat.young_modulus * sec.i_bend;
  const double eiz = mat.young_modulus * sec.i_bend;

  Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
  k(0, 0) = ea / l;
  k(0, 6) = -ea / l;
  k(6, 6) = ea / l;

  k(3, 3) = gj / l;
  k(3, 9) = -gj / l;
  k(9, 9) = gj / l;

  // bending in the local x-y plane, rotations about local z
  k(1, 1) = 12 * eiz / l3;
  k(1, 5) = 6 * eiz / l2;
  k(1, 7) = -12 * eiz / l3;
  k(1, 11) = 6 * eiz / l2;
  k(5, 5) = 4 * eiz / l;
  k(5, 7) = -6 * eiz / l2;
  k(5, 11) = 2 * eiz / l;
  k(7, 7) = 12 * eiz / l3;
  k(7, 11) = -6 * eiz / l2;
  k(11, 11) = 4 * eiz / l;

  // bending in the local x-z plane, rotations about local y
  k(2, 2) = 12 * eiy / l3;
  k(2, 4) = -6 * eiy / l2;
  k(2, 8) = -12 * eiy / l3;
  k(2, 10) = -6 * eiy / l2;
  k(4, 4) = 4 * eiy / l;
  k(4, 8) = 6 * eiy / l2;
  k(4, 10) = 2 * eiy / l;
  k(8, 8) = 12 * eiy / l3;
  k(8, 10) = 6 * eiy / l2;
  k(10, 10) = 4 * eiy / l;

  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) k(j, i) = k(i, j);
  }
  return k;
}

Eigen::Matrix3d element_rotation(const Vec3& dir) {
  const Vec3 xl = dir.normalized();
  Vec3 yl = Vec3::UnitZ().cross(xl);
  if (yl.norm() < 1e-8) {
    yl = xl.cross(Vec3::UnitX());
  }
  yl.normalize();
  const Vec3 zl = xl.cross(yl);
  Eigen::Matrix3d r;
  r.row(0) = xl.transpose();
  r.row(1) = yl.transpose();
  r.row(2) = zl.transpose();
  return r;
}

Eigen::MatrixXd element_global_stiffness(const Lattice& lat, int e,
                                         ElementModel model) {
  const double len = lat.edge_length(e);
  const Eigen::Matrix3d r = element_rotation(lat.edge_direction(e));
  const double ea = lat.material.young_modulus * lat.section.area;

  if (model == ElementModel::kTruss) {
    Eigen::Matrix<double, 6, 6> t = Eigen::Matrix<double, 6, 6>::Zero();
    t.block<3, 3>(0, 0) = r;
    t.block<3, 3>(3, 3) = r;
    return t.transpose() * truss_local_stiffness(ea, len) * t;
  }
  Eigen::Matrix<double, 12, 12> t = Eigen::Matrix<double, 12, 12>::Zero();
  for (int b = 0; b < 4; ++b) t.block<3, 3>(3 * b, 3 * b) = r;
  return t.transpose() *
         beam_local_stiffness(lat.section, lat.material, len) * t;
}

Eigen::MatrixXd assemble(const Lattice& lat, ElementModel model) {
  const int nd = dofs_per_node(model);
  const int n = lat.n_nodes() * nd;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < lat.n_edges(); ++e) {
    const Eigen::MatrixXd ke = element_global_stiffness(lat, e, model);
    const int gi = lat.edges[e].first * nd;
    const int gj = lat.edges[e].second * nd;
    k.block(gi, gi, nd, nd) += ke.block(0, 0, nd, nd);
    k.block(gi, gj, nd, nd) += ke.block(0, nd, nd, nd);
    k.block(gj, gi, nd, nd) += ke.block(nd, 0, nd, nd);
    k.block(gj, gj, nd, nd) += ke.block(nd, nd, nd, nd);
  }
  return k;
}

Prescribed uniaxial_bcs(const Lattice& lat, ElementModel model,
                        double u_star) {
  if (lat.n_nodes() < 8) throw DegenerateInput("lattice lacks corner nodes");
  const int nd = dofs_per_node(model);
  Prescribed p;
  for (int c = 0; c < 8; ++c) {
    p.emplace_back(c * nd + 0, 0.0);
    p.emplace_back(c * nd + 1, 0.0);
    p.emplace_back(c * nd + 2, c < 4 ? 0.0 : u_star);
    if (model == ElementModel::kBeam) {
      p.emplace_back(c * nd + 3, 0.0);
      p.emplace_back(c * nd + 4, 0.0);
      p.emplace_back(c * nd + 5, 0.0);
    }
  }
  return p;
}

StaticSolution solve_condensed(const Eigen::MatrixXd& k,
                               const Prescribed& prescribed) {
  const int n = static_cast<int>(k.rows());
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (const auto& [dof, val] : prescribed) {
    if (dof < 0 || dof >= n) throw DimensionMismatch("BC dof out of range");
    fixed[dof] = 1;
    u(dof) = val;
  }
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) free_idx.push_back(i);
  }
  const int nf = static_cast<int>(free_idx.size());

  if (nf > 0) {
    Eigen::MatrixXd kff(nf, nf);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) kff(a, b) = k(free_idx[a], free_idx[b]);
    }
    for (int a = 0; a < nf; ++a) {
      double acc = 0.0;
      for (const auto& [dof, val] : prescribed) {
        acc += k(free_idx[a], dof) * val;
      }
      rhs(a) = -acc;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(kff);
    if (ldlt.info() != Eigen::Success) {
      throw SingularSystem("stiffness factorization failed");
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || d.cwiseAbs().minCoeff() <= 1e-12 * dmax) {
      throw SingularSystem("free-free stiffness block is rank deficient");
    }
    const Eigen::VectorXd uf = ldlt.solve(rhs);
    if (!uf.allFinite()) throw SingularSystem("non-finite displacement");
    for (int a = 0; a < nf; ++a) u(free_idx[a]) = uf(a);
  }

  StaticSolution sol;
  sol.u = u;
  sol.f = k * u;
  for (const auto& [dof, val] : prescribed) {
    sol.work_reactions += sol.f(dof) * val;
  }
  sol.work_quadratic = u.dot(sol.f);
  return sol;
}

double effective_modulus(double work, double edge, double u_star) {
  if (!(edge > 0.0) || u_star == 0.0) {
    throw DegenerateInput("invalid modulus normalization");
  }
  return work * edge / (u_star * u_star * edge * edge);
}

double lattice_volume(const Lattice& lat) {
  double v = 0.0;
  for (int e = 0; e < lat.n_edges(); ++e) {
    v += lat.section.area * lat.edge_length(e);
  }
  return v;
}

UniaxialResult solve_lattice(const Lattice& lat, ElementModel model,
                             double u_star) {
  if (u_star <= 0.0) u_star = 1e-3 * lat.domain_edge;
  const Eigen::MatrixXd k = assemble(lat, model);
  const Prescribed bc = uniaxial_bcs(lat, model, u_star);
  UniaxialResult r;
  r.sol = solve_condensed(k, bc);
  r.u_star = u_star;
  r.e_eq = effective_modulus(r.sol.work_reactions, lat.domain_edge, u_star);
  r.volume = lattice_volume(lat);
  return r;
}

}  // namespace latticeforge
