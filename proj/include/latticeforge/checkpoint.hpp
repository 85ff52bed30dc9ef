#pragma once

#include <string>

#include "latticeforge/gnn.hpp"
#include "latticeforge/nn.hpp"

namespace latticeforge {

struct CheckpointMeta {
  std::string kind;  // dnn-toy, dnn-slice, gnn-truss, gnn-beam
  std::uint64_t seed = 0;
  int epochs = 0;
  double lr = 0.0;
  int batch_size = 0;
  double best_val = 0.0;
  int best_epoch = -1;
  int n_slices = 0;  // slice count (or spring count for the toy model)
  int n_val = 0;     // validation rows carved from the training pool
};

struct MlpCheckpoint {
  Mlp mlp;
  StandardScaler input;
  StandardScaler target;
  CheckpointMeta meta;
};

struct GnnCheckpoint {
  GnnModel model;
  CheckpointMeta meta;
};

void save_mlp(const std::string& path, const Mlp& mlp,
              const StandardScaler& input, const StandardScaler& target,
              const CheckpointMeta& meta);
MlpCheckpoint load_mlp(const std::string& path);

void save_gnn(const std::string& path, const GnnModel& model,
              const CheckpointMeta& meta);
GnnCheckpoint load_gnn(const std::string& path);

// Reads only the schema tag and kind, for dispatch and model-info.
CheckpointMeta peek_checkpoint(const std::string& path);

}  // namespace latticeforge
