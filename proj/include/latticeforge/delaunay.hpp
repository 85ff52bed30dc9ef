#pragma once

#include <array>
#include <vector>

#include "latticeforge/geometry.hpp"

namespace latticeforge {

using Tet = std::array<int, 4>;

// Incremental Bowyer-Watson tetrahedralization. Throws DegenerateInput when
// the predicate tolerance cannot resolve the configuration (the caller is
// expected to resample and retry).
std::vector<Tet> delaunay_3d(const std::vector<Vec3>& points);

// Unique undirected edge set of a tetrahedralization, each pair with i < j,
// sorted lexicographically.
std::vector<Edge> tets_to_edges(const std::vector<Tet>& tets);

// Signed volume times 6 of tet (a,b,c,d); positive when d sees (a,b,c)
// counter-clockwise.
double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// > 0 when e lies strictly inside the circumsphere of positively oriented
// (a,b,c,d).
double insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                const Vec3& e);

// Circumcenter and radius by solving the linear system of equidistance;
// throws DegenerateInput for flat tets. Used by verification and tests.
std::pair<Vec3, double> circumsphere(const Vec3& a, const Vec3& b,
                                     const Vec3& c, const Vec3& d);

}  // namespace latticeforge
