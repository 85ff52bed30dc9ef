#pragma once

#include <string>
#include <vector>

#include "latticeforge/dataset.hpp"
#include "latticeforge/gnn.hpp"
#include "latticeforge/nn.hpp"

namespace latticeforge {

struct ScatterRow {
  std::string split;  // train / val / test
  double truth;
  double pred;
};

struct DnnOutcome {
  Mlp mlp;
  StandardScaler input, target;
  FitResult fit;
  double r2_train = 0, r2_val = 0, r2_test = 0;
  double loss_train = 0, loss_test = 0;  // MSE on standardized targets
  std::vector<ScatterRow> scatter;
};

// Random series-of-springs regression: features are the n_springs inverse
// stiffnesses 1/(EA)_e, the target is the series equivalent stiffness.
struct ToyConfig {
  int rows = 50000;  // desk scale; 20000 * n_s at full scale
  int n_springs = 19;
  double ea_min = 10.0;
  double ea_max = 100.0;
  int epochs = 500;
  double lr = 1e-2;  // desk scale; 1e-3 at full scale
  int batch_size = 0;  // full batch
  std::uint64_t seed = 0;
};

void toy_data(const ToyConfig& cfg, Eigen::MatrixXd& x, Eigen::VectorXd& y);
DnnOutcome run_toy(const ToyConfig& cfg);

// Slice-feature regression of the volume-normalized modulus. Records flagged
// for zero-area slices are excluded before splitting.
struct SliceConfig {
  int n_s = 19;
  int epochs = 500;
  double lr = 1e-3;
  int batch_size = 128;
  std::uint64_t seed = 0;
};

struct SliceOutcome {
  DnnOutcome out;
  long excluded = 0;
  int used = 0;
};

SliceOutcome run_slice(const LabeledSet& data, const SliceConfig& cfg);

// Graph regression of E_z^eq. The pool is carved into train/val; metrics on
// "test" come from the separately generated hidden set.
struct GnnRunConfig {
  int n_val = 0;  // 0 takes 15% of the pool
  int epochs = 2000;
  double lr = 1e-2;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

struct GnnOutcome {
  GnnModel model;
  FitResult fit;
  double r2_train = 0, r2_val = 0, r2_test = 0;
  double loss_train = 0, loss_test = 0;
  std::vector<ScatterRow> scatter;
};

GnnOutcome run_gnn(const LabeledSet& pool, const LabeledSet& hidden,
                   const GnnRunConfig& cfg);

// Shared dense-regression driver: architecture in -> in -> 5 in -> 1 with
// selu, selu, linear; scalers fitted on the training split only.
DnnOutcome train_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const SplitIdx& split, const FitConfig& fcfg);

// Harmonic-series equivalent axial stiffness per lattice for several slice
// counts, binned for plotting. Lattices with an empty z slice are skipped.
struct HistogramRow {
  int n_s;
  double left, right;
  long count;
};

std::vector<HistogramRow> limit_histogram(const LabeledSet& set,
                                          const std::vector<int>& slice_counts,
                                          int bins);

void write_history_csv(const std::string& path, const FitResult& fit);
// scale multiplies truth/prediction on the way out (1e-6 for Pa to MPa).
void write_scatter_csv(const std::string& path,
                       const std::vector<ScatterRow>& rows, double scale = 1.0);
void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramRow>& rows);

}  // namespace latticeforge
