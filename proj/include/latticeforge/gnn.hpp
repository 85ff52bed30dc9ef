#pragma once

#include <optional>

#include "latticeforge/geometry.hpp"
#include "latticeforge/nn.hpp"

namespace latticeforge {

struct GraphSample {
  Eigen::MatrixXd node_feats;  // n_j x 3 joint coordinates
  Eigen::MatrixXd edge_feats;  // n_e x 7: endpoint coords (i < j order), length
  std::vector<Edge> edges;
  std::optional<double> target;  // E_z^eq in Pa

  int n_nodes() const { return static_cast<int>(node_feats.rows()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
};

GraphSample build_graph_sample(const Lattice& lat,
                               std::optional<double> label = std::nullopt);

// Message-passing regressor: node/edge embeddings, two graph updates with
// mean aggregation, mean pooling over nodes, linear head. Undirected edges
// are doubled into two directed messages; the reverse copy swaps the
// endpoint coordinate triplets in the edge-embedding input.
struct GnnModel {
  DenseLayer node_embed;  // 3 -> 5  prelu
  DenseLayer edge_embed;  // 7 -> 5  prelu
  DenseLayer msg1;        // 15 -> 10 selu
  DenseLayer upd1;        // 15 -> 10 selu
  DenseLayer msg2;        // 25 -> 10 selu
  DenseLayer upd2;        // 20 -> 10 selu
  DenseLayer head;        // 10 -> 1  linear
  StandardScaler node_scaler;
  StandardScaler edge_scaler;    // fitted on direction-doubled edge rows
  StandardScaler target_scaler;

  static GnnModel make(std::uint64_t seed);

  // Output node id of the scaled predictions, one row per graph in batch.
  int forward(Tape& t, const std::vector<const GraphSample*>& batch,
              std::vector<ParamSlot>* slots);

  double predict(const GraphSample& sample);  // Pa

  int n_params() const;
  std::vector<Eigen::MatrixXd*> parameters();
};

// Directed doubling of one sample's edge rows: 2 n_e x 7, straight copies
// first, endpoint-swapped copies interleaved after each. Shared with scaler
// fitting so training statistics match the forward pass exactly.
Eigen::MatrixXd directed_edge_rows(const GraphSample& s);

}  // namespace latticeforge
