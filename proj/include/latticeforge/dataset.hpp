#pragma once

#include <string>
#include <vector>

#include "latticeforge/mechanics.hpp"

namespace latticeforge {

struct DatasetConfig {
  int n = 0;  // kept records
  ElementModel model = ElementModel::kTruss;
  std::uint64_t global_seed = 0;
  std::uint64_t stream = seed_stream::kDataset;
  int n_free_min = 1;
  int n_free_max = 50;
  double radius_m = 0.005;
  double young_pa = 193e9;
  double poisson = 0.3;
  double domain_edge = 1.0;
  double epsilon = 0.05;
  int workers = 1;
};

struct SampleRecord {
  long id = -1;
  std::uint64_t seed = 0;  // per-sample seed, regenerates the lattice
  int n_free = 0;
  std::vector<Vec3> nodes;
  std::vector<Edge> edges;
  double radius_m = 0.0;
  double young_pa = 0.0;
  double poisson = 0.3;
  double domain_edge = 1.0;
  ElementModel model = ElementModel::kTruss;
  double label_pa = 0.0;    // E_z^eq
  double volume_m3 = 0.0;
  Eigen::VectorXd slice_inv_areas;  // 3 n_s inverse areas; empty if absent
  double e_per_volume = 0.0;        // label / volume, set with slice features
  bool zero_area = false;

  Lattice to_lattice() const;
};

struct Manifest {
  std::string name;
  std::string model;  // "truss" or "beam"
  std::uint64_t global_seed = 0;
  std::uint64_t stream = 0;
  long requested = 0;  // generation attempts consumed
  long kept = 0;
  long discarded_singular = 0;
  long discarded_degenerate = 0;
  long flagged_zero_area = 0;
  long split_train = -1;
  long split_val = -1;
  long split_test = -1;
  std::string scaler_stats;  // checkpoint path once a model is trained
  std::string units = "SI";
};

struct LabeledSet {
  std::vector<SampleRecord> records;
  Manifest manifest;
};

// One attempt's lattice from its per-sample seed: the seed drives both the
// joint count draw and the geometry stream. Shared by the dataset generator
// and candidate regeneration. Throws GenerationFailed on a bad draw.
Lattice lattice_from_sample_seed(const DatasetConfig& cfg,
                                 std::uint64_t sample_seed,
                                 int* n_free_out = nullptr);

// Generates lattices from per-index derived seeds, solves each uniaxial
// ground truth, discards singular draws and keeps generating until cfg.n
// records exist. Deterministic for a fixed config regardless of workers.
LabeledSet generate_labeled(const DatasetConfig& cfg);

// Adds 3 n_s inverse effective areas and the per-volume target to every
// record; flags zero-area slices and counts them in the manifest.
void attach_slice_features(LabeledSet& set, int n_s);

struct SplitIdx {
  std::vector<int> train, val, test;
};

// Deterministic disjoint shuffle split; fractions are of the total count.
SplitIdx split_dataset(int n, double val_frac, double test_frac,
                       std::uint64_t seed);
// Same with explicit validation / test counts.
SplitIdx split_counts(int n, int n_val, int n_test, std::uint64_t seed);

// JSONL with a schema header line; <path>.manifest.json sidecar. A ".gz"
// suffix on the path switches both writer and reader to gzip.
void export_jsonl(const std::string& path, const LabeledSet& set);
LabeledSet load_jsonl(const std::string& path);

std::string model_name(ElementModel m);
ElementModel model_from_name(const std::string& name);

}  // namespace latticeforge
