#pragma once

#include "latticeforge/delaunay.hpp"
#include "latticeforge/geometry.hpp"

namespace latticeforge {

// Eight cube corners followed by n_free joints drawn uniformly from the
// epsilon-shrunk interior box.
std::vector<Vec3> sample_nodes(const GenConfig& cfg);

// Full generation: sample nodes, tetrahedralize, take the tet edges as bars.
// Degenerate draws are retried with seeds derived from cfg.seed; throws
// GenerationFailed after the retry budget is spent.
Lattice generate_lattice(const GenConfig& cfg, const SectionSpec& section,
                         const MaterialSpec& material);

}  // namespace latticeforge
