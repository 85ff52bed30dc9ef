#include "latticeforge/geometry.hpp"

#include <cmath>
#include <queue>

namespace latticeforge {

SectionSpec SectionSpec::circular(double radius) {
  if (!(radius > 0.0)) throw DegenerateInput("section radius must be positive");
  SectionSpec s;
  const double pi = 3.14159265358979323846;
  s.radius = radius;
  s.area = pi * radius * radius;
  s.i_bend = 0.25 * pi * std::pow(radius, 4);
  s.j_torsion = 0.5 * pi * std::pow(radius, 4);
  return s;
}

bool SectionSpec::consistent(double rel_tol) const {
  if (!(radius > 0.0)) return false;
  const SectionSpec ref = circular(radius);
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  return close(area, ref.area) && close(i_bend, ref.i_bend) &&
         close(j_torsion, ref.j_torsion);
}

std::array<Vec3, 8> cube_corners(double edge) {
  std::array<Vec3, 8> c;
  for (int k = 0; k < 8; ++k) {
    c[k] = Vec3((k & 1) ? edge : 0.0, (k & 2) ? edge : 0.0,
                (k & 4) ? edge : 0.0);
  }
  return c;
}

bool Lattice::connected() const {
  const int n = n_nodes();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
    }
  }
  return count == n;
}

}  // namespace latticeforge
