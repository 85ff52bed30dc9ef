#include "latticeforge/lattice_gen.hpp"

#include <cmath>

namespace latticeforge {

std::vector<Vec3> sample_nodes(const GenConfig& cfg) {
  if (!cfg.valid()) throw DegenerateInput("invalid generation config");
  const double e = cfg.domain_edge;
  const double lo = cfg.epsilon * e;
  const double hi = (1.0 - cfg.epsilon) * e;
  const double min_sep = 1e-6 * e;

  std::vector<Vec3> nodes;
  nodes.reserve(8 + cfg.n_free);
  for (const Vec3& c : cube_corners(e)) nodes.push_back(c);

  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.n_free; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const Vec3 p(uniform_in(rng, lo, hi), uniform_in(rng, lo, hi),
                   uniform_in(rng, lo, hi));
      placed = true;
      for (const Vec3& q : nodes) {
        if ((p - q).norm() < min_sep) {
          placed = false;
          break;
        }
      }
      if (placed) nodes.push_back(p);
    }
    if (!placed) throw GenerationFailed("could not place a separated joint");
  }
  return nodes;
}

Lattice generate_lattice(const GenConfig& cfg, const SectionSpec& section,
                         const MaterialSpec& material) {
  if (!section.consistent()) throw DegenerateInput("inconsistent section");
  if (!material.valid()) throw DegenerateInput("invalid material");

  constexpr int kMaxAttempts = 16;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    GenConfig c = cfg;
    if (attempt > 0) {
      c.seed = derive_seed(cfg.seed, seed_stream::kRetry, attempt);
    }
    try {
      const std::vector<Vec3> nodes = sample_nodes(c);
      const std::vector<Tet> tets = delaunay_3d(nodes);

      // The convex hull of corners plus interior joints is the cube, so the
      // tets must tile it exactly; a coverage gap means a broken mesh.
      double vol = 0.0;
      for (const Tet& t : tets) {
        vol += std::abs(orient3d(nodes[t[0]], nodes[t[1]], nodes[t[2]],
                                 nodes[t[3]])) / 6.0;
      }
      const double cube_vol = std::pow(cfg.domain_edge, 3);
      if (std::abs(vol - cube_vol) > 1e-6 * cube_vol) {
        throw DegenerateInput("tetrahedra do not cover the cube");
      }

      Lattice lat;
      lat.nodes = nodes;
      lat.edges = tets_to_edges(tets);
      lat.section = section;
      lat.material = material;
      lat.domain_edge = cfg.domain_edge;
      if (!lat.connected()) throw DegenerateInput("disconnected lattice");
      return lat;
    } catch (const DegenerateInput&) {
      continue;
    }
  }
  throw GenerationFailed("lattice generation exhausted its retry budget");
}

}  // namespace latticeforge
