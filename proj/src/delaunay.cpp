#include "latticeforge/delaunay.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace latticeforge {

double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Eigen::Matrix3d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  return m.determinant();
}

double insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                const Vec3& e) {
  Eigen::Matrix4d m;
  const Vec3* pts[4] = {&a, &b, &c, &d};
  for (int r = 0; r < 4; ++r) {
    const Vec3 dif = *pts[r] - e;
    m(r, 0) = dif.x();
    m(r, 1) = dif.y();
    m(r, 2) = dif.z();
    m(r, 3) = dif.squaredNorm();
  }
  // Rows (p - e, |p - e|^2) give a negative determinant for e strictly
  // inside when (a, b, c, d) is positively oriented; flip to positive-inside.
  return -m.determinant();
}

std::pair<Vec3, double> circumsphere(const Vec3& a, const Vec3& b,
                                     const Vec3& c, const Vec3& d) {
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  const Vec3 rows[3] = {b - a, c - a, d - a};
  for (int r = 0; r < 3; ++r) {
    m.row(r) = rows[r].transpose();
    rhs(r) = 0.5 * rows[r].squaredNorm() + rows[r].dot(a);
  }
  double ext = 0.0;
  for (const Vec3& v : rows) ext = std::max(ext, v.cwiseAbs().maxCoeff());
  const double det = m.determinant();
  if (std::abs(det) <= 1e-12 * std::pow(std::max(ext, 1e-300), 3)) {
    throw DegenerateInput("flat tetrahedron has no circumsphere");
  }
  const Vec3 center = m.fullPivLu().solve(rhs);
  return {center, (center - a).norm()};
}

namespace {

struct TetRec {
  std::array<int, 4> v;
  std::array<int, 4> nbr;  // nbr[i] faces the side opposite v[i], -1 = open
  bool alive = true;
};

// Face opposite slot i, ordered so the remaining vertex lies on the
// positive side of the face plane.
constexpr int kFace[4][3] = {{1, 3, 2}, {0, 2, 3}, {0, 3, 1}, {0, 1, 2}};

struct Mesh {
  const std::vector<Vec3>& pts;
  std::vector<TetRec> tets;
  double tol_orient;
  double tol_sphere;

  double face_orient(int t, int f, const Vec3& p) const {
    const TetRec& tr = tets[t];
    return orient3d(pts[tr.v[kFace[f][0]]], pts[tr.v[kFace[f][1]]],
                    pts[tr.v[kFace[f][2]]], p);
  }

  bool sphere_contains(int t, const Vec3& p) const {
    const TetRec& tr = tets[t];
    return insphere(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]], pts[tr.v[3]],
                    p) > tol_sphere;
  }

  int locate(int hint, const Vec3& p) const {
    int t = hint;
    const std::size_t max_steps = 8 * tets.size() + 64;
    for (std::size_t step = 0; step < max_steps; ++step) {
      int worst = -1;
      double worst_o = -tol_orient;
      for (int f = 0; f < 4; ++f) {
        const double o = face_orient(t, f, p);
        if (o < worst_o) {
          worst_o = o;
          worst = f;
        }
      }
      if (worst < 0) return t;
      const int next = tets[t].nbr[worst];
      if (next < 0 || !tets[next].alive) break;
      t = next;
    }
    for (std::size_t i = 0; i < tets.size(); ++i) {
      if (!tets[i].alive) continue;
      bool inside = true;
      for (int f = 0; f < 4 && inside; ++f) {
        inside = face_orient(static_cast<int>(i), f, p) >= -tol_orient;
      }
      if (inside) return static_cast<int>(i);
    }
    throw DegenerateInput("point location failed");
  }
};

}  // namespace

std::vector<Tet> delaunay_3d(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw DegenerateInput("triangulation needs at least 4 points");

  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) throw DegenerateInput("all points coincide");
  const Vec3 center = 0.5 * (lo + hi);

  std::vector<Vec3> pts(points);
  const double big = 1e3 * extent;
  // Slightly irregular enclosing tetrahedron; the asymmetry keeps the far
  // vertices off every symmetry plane of the input.
  pts.push_back(center + big * Vec3(1.0371, 1.1529, 0.9473));
  pts.push_back(center + big * Vec3(1.1159, -0.9767, -1.0949));
  pts.push_back(center + big * Vec3(-1.2648, 1.0521, -0.8937));
  pts.push_back(center + big * Vec3(-0.9151, -1.1317, 1.2291));

  Mesh mesh{pts, {}, 1e-12 * std::pow(extent, 3), 1e-12 * std::pow(extent, 5)};
  TetRec super;
  super.v = {n, n + 1, n + 2, n + 3};
  super.nbr = {-1, -1, -1, -1};
  if (orient3d(pts[super.v[0]], pts[super.v[1]], pts[super.v[2]],
               pts[super.v[3]]) < 0.0) {
    std::swap(super.v[2], super.v[3]);
  }
  mesh.tets.push_back(super);

  std::vector<int> mark;
  int hint = 0;

  for (int pi = 0; pi < n; ++pi) {
    const Vec3& p = pts[pi];
    const int t0 = mesh.locate(hint, p);

    mark.assign(mesh.tets.size(), 0);
    const int epoch = 1;
    std::vector<int> cavity;
    std::queue<int> bfs;
    auto force = [&](int t) {
      if (t >= 0 && mesh.tets[t].alive && mark[t] != epoch) {
        mark[t] = epoch;
        cavity.push_back(t);
        bfs.push(t);
      }
    };
    force(t0);
    for (int f = 0; f < 4; ++f) {
      // A point sitting on a shared face needs both incident tets removed.
      if (std::abs(mesh.face_orient(t0, f, p)) <= mesh.tol_orient) {
        force(mesh.tets[t0].nbr[f]);
      }
    }
    while (!bfs.empty()) {
      const int t = bfs.front();
      bfs.pop();
      for (int f = 0; f < 4; ++f) {
        const int nb = mesh.tets[t].nbr[f];
        if (nb < 0 || mark[nb] == epoch) continue;
        if (mesh.sphere_contains(nb, p)) force(nb);
      }
    }

    struct BFace {
      int a, b, c;
      int outside;
    };
    std::vector<BFace> boundary;
    for (const int t : cavity) {
      for (int f = 0; f < 4; ++f) {
        const int nb = mesh.tets[t].nbr[f];
        if (nb >= 0 && mark[nb] == epoch) continue;
        const TetRec& tr = mesh.tets[t];
        boundary.push_back({tr.v[kFace[f][0]], tr.v[kFace[f][1]],
                            tr.v[kFace[f][2]], nb});
      }
    }

    const int first_new = static_cast<int>(mesh.tets.size());
    std::map<std::pair<int, int>, std::pair<int, int>> edge_slot;
    for (const BFace& bf : boundary) {
      if (orient3d(pts[bf.a], pts[bf.b], pts[bf.c], p) <= mesh.tol_orient) {
        throw DegenerateInput("cavity not star shaped");
      }
      TetRec nt;
      nt.v = {bf.a, bf.b, bf.c, pi};
      nt.nbr = {-1, -1, -1, bf.outside};
      const int nt_idx = static_cast<int>(mesh.tets.size());
      if (bf.outside >= 0) {
        TetRec& out = mesh.tets[bf.outside];
        for (int f = 0; f < 4; ++f) {
          std::array<int, 3> fv = {out.v[kFace[f][0]], out.v[kFace[f][1]],
                                   out.v[kFace[f][2]]};
          std::array<int, 3> want = {bf.a, bf.b, bf.c};
          std::sort(fv.begin(), fv.end());
          std::sort(want.begin(), want.end());
          if (fv == want) {
            out.nbr[f] = nt_idx;
            break;
          }
        }
      }
      mesh.tets.push_back(nt);
    }
    const int last_new = static_cast<int>(mesh.tets.size());
    for (int t = first_new; t < last_new; ++t) {
      const auto& v = mesh.tets[t].v;
      const int base_edges[3][2] = {{v[1], v[2]}, {v[0], v[2]}, {v[0], v[1]}};
      for (int s = 0; s < 3; ++s) {
        const auto key = std::minmax(base_edges[s][0], base_edges[s][1]);
        auto it = edge_slot.find(key);
        if (it == edge_slot.end()) {
          edge_slot.emplace(key, std::make_pair(t, s));
        } else if (it->second.first >= 0) {
          mesh.tets[t].nbr[s] = it->second.first;
          mesh.tets[it->second.first].nbr[it->second.second] = t;
          it->second.first = -1;
        } else {
          throw DegenerateInput("cavity boundary is not a closed surface");
        }
      }
    }
    for (const int t : cavity) mesh.tets[t].alive = false;
    hint = first_new;
  }

  std::vector<Tet> result;
  for (const TetRec& tr : mesh.tets) {
    if (!tr.alive) continue;
    if (tr.v[0] >= n || tr.v[1] >= n || tr.v[2] >= n || tr.v[3] >= n) continue;
    Tet t = {tr.v[0], tr.v[1], tr.v[2], tr.v[3]};
    std::sort(t.begin(), t.end());
    result.push_back(t);
  }
  std::sort(result.begin(), result.end());

  std::vector<char> used(n, 0);
  for (const Tet& t : result) {
    for (int v : t) used[v] = 1;
    const auto [c, r] = circumsphere(points[t[0]], points[t[1]], points[t[2]],
                                     points[t[3]]);
    for (int q = 0; q < n; ++q) {
      if (q == t[0] || q == t[1] || q == t[2] || q == t[3]) continue;
      if ((points[q] - c).norm() < r * (1.0 - 1e-9)) {
        throw DegenerateInput("empty circumsphere check failed");
      }
    }
  }
  for (int q = 0; q < n; ++q) {
    if (!used[q]) throw DegenerateInput("point missing from triangulation");
  }
  return result;
}

std::vector<Edge> tets_to_edges(const std::vector<Tet>& tets) {
  std::vector<Edge> edges;
  edges.reserve(tets.size() * 6);
  for (const Tet& t : tets) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        edges.emplace_back(std::min(t[i], t[j]), std::max(t[i], t[j]));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace latticeforge
