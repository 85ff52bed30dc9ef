#include "latticeforge/gnn.hpp"

namespace latticeforge {

GraphSample build_graph_sample(const Lattice& lat,
                               std::optional<double> label) {
  GraphSample s;
  s.node_feats.resize(lat.n_nodes(), 3);
  for (int j = 0; j < lat.n_nodes(); ++j) {
    s.node_feats.row(j) = lat.nodes[j].transpose();
  }
  s.edge_feats.resize(lat.n_edges(), 7);
  for (int e = 0; e < lat.n_edges(); ++e) {
    const Vec3& a = lat.nodes[lat.edges[e].first];
    const Vec3& b = lat.nodes[lat.edges[e].second];
    s.edge_feats.row(e) << a.x(), a.y(), a.z(), b.x(), b.y(), b.z(),
        (b - a).norm();
  }
  s.edges = lat.edges;
  s.target = label;
  return s;
}

Eigen::MatrixXd directed_edge_rows(const GraphSample& s) {
  Eigen::MatrixXd rows(2 * s.n_edges(), 7);
  for (int e = 0; e < s.n_edges(); ++e) {
    rows.row(2 * e) = s.edge_feats.row(e);
    rows.row(2 * e + 1).segment(0, 3) = s.edge_feats.row(e).segment(3, 3);
    rows.row(2 * e + 1).segment(3, 3) = s.edge_feats.row(e).segment(0, 3);
    rows(2 * e + 1, 6) = s.edge_feats(e, 6);
  }
  return rows;
}

GnnModel GnnModel::make(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GnnModel m;
  m.node_embed = DenseLayer::make(3, 5, Activation::kPrelu, rng);
  m.edge_embed = DenseLayer::make(7, 5, Activation::kPrelu, rng);
  m.msg1 = DenseLayer::make(15, 10, Activation::kSelu, rng);
  m.upd1 = DenseLayer::make(15, 10, Activation::kSelu, rng);
  m.msg2 = DenseLayer::make(25, 10, Activation::kSelu, rng);
  m.upd2 = DenseLayer::make(20, 10, Activation::kSelu, rng);
  m.head = DenseLayer::make(10, 1, Activation::kLinear, rng);
  return m;
}

int GnnModel::forward(Tape& t, const std::vector<const GraphSample*>& batch,
                      std::vector<ParamSlot>* slots) {
  if (batch.empty()) throw EmptyRange("empty graph batch");
  int total_nodes = 0;
  int total_dir_edges = 0;
  for (const GraphSample* s : batch) {
    total_nodes += s->n_nodes();
    total_dir_edges += 2 * s->n_edges();
  }
  if (total_dir_edges == 0) throw IsolatedNode("batch has no edges");

  Eigen::MatrixXd nodes(total_nodes, 3);
  Eigen::MatrixXd edges(total_dir_edges, 7);
  std::vector<int> src(total_dir_edges), dst(total_dir_edges);
  std::vector<int> graph_of_node(total_nodes);
  {
    int noff = 0, eoff = 0, g = 0;
    for (const GraphSample* s : batch) {
      nodes.middleRows(noff, s->n_nodes()) = s->node_feats;
      edges.middleRows(eoff, 2 * s->n_edges()) = directed_edge_rows(*s);
      for (int e = 0; e < s->n_edges(); ++e) {
        const auto& [i, j] = s->edges[e];
        src[eoff + 2 * e] = noff + i;
        dst[eoff + 2 * e] = noff + j;
        src[eoff + 2 * e + 1] = noff + j;
        dst[eoff + 2 * e + 1] = noff + i;
      }
      for (int j = 0; j < s->n_nodes(); ++j) graph_of_node[noff + j] = g;
      noff += s->n_nodes();
      eoff += 2 * s->n_edges();
      ++g;
    }
  }

  const int xn = t.constant(node_scaler.transform(nodes));
  const int xe = t.constant(edge_scaler.transform(edges));
  const int h0 = node_embed.forward(t, xn, slots);
  const int he = edge_embed.forward(t, xe, slots);

  auto update = [&](int h, DenseLayer& msg, DenseLayer& upd) {
    const int from = t.gather_rows(h, src);
    const int to = t.gather_rows(h, dst);
    const int m_in = t.concat_cols(t.concat_cols(from, to), he);
    const int m = msg.forward(t, m_in, slots);
    const int agg = t.segment_mean(m, dst, total_nodes);
    return upd.forward(t, t.concat_cols(h, agg), slots);
  };
  const int h1 = update(h0, msg1, upd1);
  const int h2 = update(h1, msg2, upd2);

  const int pooled = t.segment_mean(h2, graph_of_node,
                                    static_cast<int>(batch.size()));
  return head.forward(t, pooled, slots);
}

double GnnModel::predict(const GraphSample& sample) {
  Tape t;
  const std::vector<const GraphSample*> batch = {&sample};
  const int out = forward(t, batch, nullptr);
  Eigen::MatrixXd scaled = t.value(out);
  return target_scaler.inverse(scaled)(0, 0);
}

int GnnModel::n_params() const {
  return node_embed.n_params() + edge_embed.n_params() + msg1.n_params() +
         upd1.n_params() + msg2.n_params() + upd2.n_params() +
         head.n_params();
}

std::vector<Eigen::MatrixXd*> GnnModel::parameters() {
  std::vector<Eigen::MatrixXd*> out;
  node_embed.collect(out);
  edge_embed.collect(out);
  msg1.collect(out);
  upd1.collect(out);
  msg2.collect(out);
  upd2.collect(out);
  head.collect(out);
  return out;
}

}  // namespace latticeforge
