#pragma once

#include <string>
#include <vector>

#include "latticeforge/dataset.hpp"
#include "latticeforge/gnn.hpp"

namespace latticeforge {

struct DesignPoint {
  long id = 0;
  std::uint64_t seed = 0;  // regenerates the lattice via the candidate recipe
  int n_free = 0;
  double volume = 0.0;      // m^3 of solid material
  double inv_volume = 0.0;  // 1/volume, the lightness objective
  double e_pred = 0.0;      // surrogate E_z^eq in Pa
};

struct InverseDb {
  std::vector<DesignPoint> points;
  long requested = 0;
  long discarded = 0;
};

// Samples candidate lattices (same per-index seeding recipe as the dataset
// generator, default stream kInverseDb) and scores each with the surrogate.
InverseDb build_design_db(const DatasetConfig& cfg, GnnModel& model);

// a dominates b when a is no worse in both objectives and better in one.
bool dominates(const DesignPoint& a, const DesignPoint& b);

// Indices of the non-dominated points, sorted by predicted modulus
// ascending. Sweep over an inv_volume ordering, O(n log n).
std::vector<int> pareto_front(const std::vector<DesignPoint>& db);

struct QueryResult {
  int best = -1;             // index of the lightest in-band point
  std::vector<int> in_band;  // all indices with e_pred inside the band
};

// Candidates with e_pred in [e_min, e_max]; best is the one with maximal
// inv_volume, ties broken by higher e_pred then lower id. Throws EmptyRange
// when the band is empty.
QueryResult local_query(const std::vector<DesignPoint>& db, double e_min,
                        double e_max);

// Rebuilds the candidate's lattice from its seed.
Lattice regenerate_candidate(const DesignPoint& p, const DatasetConfig& cfg);

// Re-solves the regenerated lattice and returns |E_solved - e_pred| /
// E_solved.
double validate_candidate(const DesignPoint& p, const DatasetConfig& cfg);

void write_design_csv(const std::string& path,
                      const std::vector<DesignPoint>& db,
                      const std::vector<int>& front);

}  // namespace latticeforge
