#include "latticeforge/checkpoint.hpp"

#include <json.hpp>

#include <fstream>

#include "latticeforge/common.hpp"

namespace latticeforge {

using nlohmann::json;

namespace {

std::string act_name(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kSelu: return "selu";
    case Activation::kPrelu: return "prelu";
  }
  throw SchemaMismatch("unknown activation");
}

Activation act_from_name(const std::string& s) {
  if (s == "linear") return Activation::kLinear;
  if (s == "selu") return Activation::kSelu;
  if (s == "prelu") return Activation::kPrelu;
  throw SchemaMismatch("unknown activation: " + s);
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw SchemaMismatch("matrix payload size disagrees with its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

json layer_to_json(const DenseLayer& l) {
  json j;
  j["act"] = act_name(l.act);
  j["w"] = mat_to_json(l.w);
  j["b"] = mat_to_json(l.b);
  if (l.act == Activation::kPrelu) j["slopes"] = mat_to_json(l.slopes);
  return j;
}

DenseLayer layer_from_json(const json& j) {
  DenseLayer l;
  l.act = act_from_name(j.at("act").get<std::string>());
  l.w = mat_from_json(j.at("w"));
  l.b = mat_from_json(j.at("b"));
  if (l.b.rows() != 1 || l.b.cols() != l.w.cols()) {
    throw SchemaMismatch("bias shape disagrees with weights");
  }
  if (l.act == Activation::kPrelu) {
    l.slopes = mat_from_json(j.at("slopes"));
    if (l.slopes.rows() != 1 || l.slopes.cols() != l.w.cols()) {
      throw SchemaMismatch("slope shape disagrees with weights");
    }
  }
  return l;
}

json scaler_to_json(const StandardScaler& s) {
  json j;
  json mean = json::array();
  json std_ = json::array();
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) mean.push_back(s.mean(i));
  for (Eigen::Index i = 0; i < s.std.size(); ++i) std_.push_back(s.std(i));
  j["mean"] = std::move(mean);
  j["std"] = std::move(std_);
  return j;
}

StandardScaler scaler_from_json(const json& j) {
  StandardScaler s;
  const auto& mean = j.at("mean");
  const auto& std_ = j.at("std");
  if (mean.size() != std_.size()) {
    throw SchemaMismatch("scaler mean and std differ in length");
  }
  s.mean.resize(static_cast<Eigen::Index>(mean.size()));
  s.std.resize(static_cast<Eigen::Index>(std_.size()));
  for (std::size_t i = 0; i < mean.size(); ++i) {
    s.mean(static_cast<Eigen::Index>(i)) = mean[i].get<double>();
    s.std(static_cast<Eigen::Index>(i)) = std_[i].get<double>();
  }
  return s;
}

json meta_to_json(const CheckpointMeta& m) {
  json j;
  j["kind"] = m.kind;
  j["seed"] = m.seed;
  j["epochs"] = m.epochs;
  j["lr"] = m.lr;
  j["batch_size"] = m.batch_size;
  j["best_val"] = m.best_val;
  j["best_epoch"] = m.best_epoch;
  j["n_slices"] = m.n_slices;
  j["n_val"] = m.n_val;
  return j;
}

CheckpointMeta meta_from_json(const json& j) {
  CheckpointMeta m;
  m.kind = j.at("kind").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.epochs = j.at("epochs").get<int>();
  m.lr = j.at("lr").get<double>();
  m.batch_size = j.at("batch_size").get<int>();
  m.best_val = j.at("best_val").get<double>();
  m.best_epoch = j.at("best_epoch").get<int>();
  m.n_slices = j.at("n_slices").get<int>();
  m.n_val = j.value("n_val", 0);
  return m;
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptRecord(0, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptRecord(0, e.what());
  }
  if (j.value("schema", "") != kCheckpointTag) {
    throw SchemaMismatch("not a model checkpoint: " + path);
  }
  return j;
}

}  // namespace

void save_mlp(const std::string& path, const Mlp& mlp,
              const StandardScaler& input, const StandardScaler& target,
              const CheckpointMeta& meta) {
  json j;
  j["schema"] = kCheckpointTag;
  j["family"] = "mlp";
  j["meta"] = meta_to_json(meta);
  json layers = json::array();
  for (const DenseLayer& l : mlp.layers) layers.push_back(layer_to_json(l));
  j["layers"] = std::move(layers);
  j["input_scaler"] = scaler_to_json(input);
  j["target_scaler"] = scaler_to_json(target);
  write_file(path, j);
}

MlpCheckpoint load_mlp(const std::string& path) {
  const json j = read_file(path);
  if (j.value("family", "") != "mlp") {
    throw SchemaMismatch("checkpoint does not hold a dense model");
  }
  MlpCheckpoint ck;
  ck.meta = meta_from_json(j.at("meta"));
  for (const auto& lj : j.at("layers")) {
    ck.mlp.layers.push_back(layer_from_json(lj));
  }
  for (std::size_t i = 1; i < ck.mlp.layers.size(); ++i) {
    if (ck.mlp.layers[i].in_dim() != ck.mlp.layers[i - 1].out_dim()) {
      throw SchemaMismatch("layer shapes do not chain");
    }
  }
  ck.input = scaler_from_json(j.at("input_scaler"));
  ck.target = scaler_from_json(j.at("target_scaler"));
  if (!ck.mlp.layers.empty() &&
      ck.input.mean.size() != ck.mlp.layers.front().in_dim()) {
    throw SchemaMismatch("input scaler width disagrees with the first layer");
  }
  return ck;
}

void save_gnn(const std::string& path, const GnnModel& model,
              const CheckpointMeta& meta) {
  json j;
  j["schema"] = kCheckpointTag;
  j["family"] = "gnn";
  j["meta"] = meta_to_json(meta);
  j["node_embed"] = layer_to_json(model.node_embed);
  j["edge_embed"] = layer_to_json(model.edge_embed);
  j["msg1"] = layer_to_json(model.msg1);
  j["upd1"] = layer_to_json(model.upd1);
  j["msg2"] = layer_to_json(model.msg2);
  j["upd2"] = layer_to_json(model.upd2);
  j["head"] = layer_to_json(model.head);
  j["node_scaler"] = scaler_to_json(model.node_scaler);
  j["edge_scaler"] = scaler_to_json(model.edge_scaler);
  j["target_scaler"] = scaler_to_json(model.target_scaler);
  write_file(path, j);
}

GnnCheckpoint load_gnn(const std::string& path) {
  const json j = read_file(path);
  if (j.value("family", "") != "gnn") {
    throw SchemaMismatch("checkpoint does not hold a graph model");
  }
  GnnCheckpoint ck;
  ck.meta = meta_from_json(j.at("meta"));
  ck.model.node_embed = layer_from_json(j.at("node_embed"));
  ck.model.edge_embed = layer_from_json(j.at("edge_embed"));
  ck.model.msg1 = layer_from_json(j.at("msg1"));
  ck.model.upd1 = layer_from_json(j.at("upd1"));
  ck.model.msg2 = layer_from_json(j.at("msg2"));
  ck.model.upd2 = layer_from_json(j.at("upd2"));
  ck.model.head = layer_from_json(j.at("head"));
  ck.model.node_scaler = scaler_from_json(j.at("node_scaler"));
  ck.model.edge_scaler = scaler_from_json(j.at("edge_scaler"));
  ck.model.target_scaler = scaler_from_json(j.at("target_scaler"));
  if (ck.model.node_embed.in_dim() != 3 || ck.model.edge_embed.in_dim() != 7 ||
      ck.model.head.out_dim() != 1) {
    throw SchemaMismatch("graph checkpoint has unexpected layer shapes");
  }
  return ck;
}

CheckpointMeta peek_checkpoint(const std::string& path) {
  const json j = read_file(path);
  return meta_from_json(j.at("meta"));
}

}  // namespace latticeforge
