#include "latticeforge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "latticeforge/slicing.hpp"

namespace latticeforge {

namespace {

class DenseRegressor : public TrainableModel {
 public:
  DenseRegressor(Mlp* mlp, Eigen::MatrixXd xtr, Eigen::MatrixXd ytr,
                 Eigen::MatrixXd xval, Eigen::MatrixXd yval)
      : mlp_(mlp),
        xtr_(std::move(xtr)),
        ytr_(std::move(ytr)),
        xval_(std::move(xval)),
        yval_(std::move(yval)) {}

  int n_train() const override { return static_cast<int>(xtr_.rows()); }

  int build_loss(Tape& t, const std::vector<int>& rows,
                 std::vector<ParamSlot>& slots) override {
    const int nb = static_cast<int>(rows.size());
    Eigen::MatrixXd xb(nb, xtr_.cols());
    Eigen::MatrixXd yb(nb, 1);
    for (int i = 0; i < nb; ++i) {
      xb.row(i) = xtr_.row(rows[i]);
      yb(i, 0) = ytr_(rows[i], 0);
    }
    const int pred = mlp_->forward(t, t.constant(std::move(xb)), &slots);
    return t.mse_loss(pred, t.constant(std::move(yb)));
  }

  double val_loss() override {
    Tape t;
    const int pred = mlp_->forward(t, t.constant(xval_), nullptr);
    return t.scalar(t.mse_loss(pred, t.constant(yval_)));
  }

  std::vector<Eigen::MatrixXd*> parameters() override {
    return mlp_->parameters();
  }

 private:
  Mlp* mlp_;
  Eigen::MatrixXd xtr_, ytr_, xval_, yval_;
};

Eigen::VectorXd predict_dense(Mlp& mlp, const StandardScaler& input,
                              const StandardScaler& target,
                              const Eigen::MatrixXd& x_raw) {
  Tape t;
  const int pred = mlp.forward(t, t.constant(input.transform(x_raw)), nullptr);
  return target.inverse(t.value(pred)).col(0);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x,
                          const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  }
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  }
  return out;
}

void append_scatter(std::vector<ScatterRow>& rows, const char* split,
                    const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    rows.push_back({split, truth(i), pred(i)});
  }
}

}  // namespace

DnnOutcome train_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const SplitIdx& split, const FitConfig& fcfg) {
  DnnOutcome out;
  const Eigen::MatrixXd xtr_raw = take_rows(x, split.train);
  const Eigen::VectorXd ytr_raw = take(y, split.train);
  out.input.fit(xtr_raw);
  out.target.fit(ytr_raw);

  const auto scale_y = [&](const Eigen::VectorXd& v) {
    return Eigen::MatrixXd(out.target.transform(v));
  };
  const int d = static_cast<int>(x.cols());
  out.mlp = Mlp::make({d, d, 5 * d, 1},
                      {Activation::kSelu, Activation::kSelu,
                       Activation::kLinear},
                      derive_seed(fcfg.seed, seed_stream::kInit));

  DenseRegressor reg(&out.mlp, out.input.transform(xtr_raw), scale_y(ytr_raw),
                     out.input.transform(take_rows(x, split.val)),
                     scale_y(take(y, split.val)));
  out.fit = fit(reg, fcfg);

  const Eigen::VectorXd yva_raw = take(y, split.val);
  const Eigen::VectorXd yte_raw = take(y, split.test);
  const Eigen::VectorXd ptr = predict_dense(out.mlp, out.input, out.target, xtr_raw);
  const Eigen::VectorXd pva =
      predict_dense(out.mlp, out.input, out.target, take_rows(x, split.val));
  const Eigen::VectorXd pte =
      predict_dense(out.mlp, out.input, out.target, take_rows(x, split.test));

  out.r2_train = r2_score(ptr, ytr_raw);
  out.r2_val = r2_score(pva, yva_raw);
  out.r2_test = r2_score(pte, yte_raw);
  out.loss_train = mse(out.target.transform(ptr).col(0),
                       out.target.transform(ytr_raw).col(0));
  out.loss_test = mse(out.target.transform(pte).col(0),
                      out.target.transform(yte_raw).col(0));
  append_scatter(out.scatter, "train", ytr_raw, ptr);
  append_scatter(out.scatter, "val", yva_raw, pva);
  append_scatter(out.scatter, "test", yte_raw, pte);
  return out;
}

void toy_data(const ToyConfig& cfg, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  if (cfg.rows < 4 || cfg.n_springs < 1) {
    throw EmptyRange("toy dataset too small");
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, seed_stream::kToyData));
  x.resize(cfg.rows, cfg.n_springs);
  y.resize(cfg.rows);
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.n_springs; ++c) {
      x(r, c) = 1.0 / uniform_in(rng, cfg.ea_min, cfg.ea_max);
    }
    y(r) = cfg.n_springs / x.row(r).sum();
  }
}

DnnOutcome run_toy(const ToyConfig& cfg) {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  toy_data(cfg, x, y);
  // Held-out test is 15% of everything, validation 15% of the remainder.
  const SplitIdx split = split_dataset(cfg.rows, 0.15 * 0.85, 0.15, cfg.seed);
  FitConfig fcfg;
  fcfg.epochs = cfg.epochs;
  fcfg.lr = cfg.lr;
  fcfg.batch_size = cfg.batch_size;
  fcfg.seed = cfg.seed;
  return train_dense(x, y, split, fcfg);
}

SliceOutcome run_slice(const LabeledSet& data, const SliceConfig& cfg) {
  SliceOutcome res;
  std::vector<Eigen::VectorXd> feats;
  std::vector<double> targets;
  for (const SampleRecord& rec : data.records) {
    Eigen::VectorXd inv = rec.slice_inv_areas;
    bool zero = rec.zero_area;
    if (inv.size() != 3 * cfg.n_s) {
      const InverseAreas ia = inverse_areas(slice_areas(rec.to_lattice(), cfg.n_s));
      inv = ia.inv;
      zero = ia.zero_area;
    }
    if (zero) {
      ++res.excluded;
      continue;
    }
    feats.push_back(std::move(inv));
    targets.push_back(rec.label_pa / rec.volume_m3);
  }
  res.used = static_cast<int>(feats.size());
  if (res.used < 8) throw EmptyRange("too few usable slice records");

  Eigen::MatrixXd x(res.used, 3 * cfg.n_s);
  Eigen::VectorXd y(res.used);
  for (int i = 0; i < res.used; ++i) {
    x.row(i) = feats[i].transpose();
    y(i) = targets[i];
  }
  // Validation is 15% of everything, test 15% of the remainder.
  const SplitIdx split = split_dataset(res.used, 0.15, 0.15 * 0.85, cfg.seed);
  FitConfig fcfg;
  fcfg.epochs = cfg.epochs;
  fcfg.lr = cfg.lr;
  fcfg.batch_size = cfg.batch_size;
  fcfg.seed = cfg.seed;
  res.out = train_dense(x, y, split, fcfg);
  return res;
}

namespace {

class GraphRegressor : public TrainableModel {
 public:
  GraphRegressor(GnnModel* model, const std::vector<GraphSample>* samples,
                 std::vector<int> train_idx, std::vector<int> val_idx,
                 Eigen::VectorXd ytr_scaled, Eigen::VectorXd yval_scaled)
      : model_(model),
        samples_(samples),
        train_idx_(std::move(train_idx)),
        val_idx_(std::move(val_idx)),
        ytr_(std::move(ytr_scaled)),
        yval_(std::move(yval_scaled)) {}

  int n_train() const override { return static_cast<int>(train_idx_.size()); }

  int build_loss(Tape& t, const std::vector<int>& rows,
                 std::vector<ParamSlot>& slots) override {
    std::vector<const GraphSample*> batch;
    batch.reserve(rows.size());
    Eigen::MatrixXd yb(static_cast<Eigen::Index>(rows.size()), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      batch.push_back(&(*samples_)[train_idx_[rows[i]]]);
      yb(static_cast<Eigen::Index>(i), 0) = ytr_(rows[i]);
    }
    const int pred = model_->forward(t, batch, &slots);
    return t.mse_loss(pred, t.constant(std::move(yb)));
  }

  double val_loss() override {
    double sse = 0.0;
    constexpr int kChunk = 256;
    for (std::size_t lo = 0; lo < val_idx_.size(); lo += kChunk) {
      const std::size_t hi = std::min(val_idx_.size(), lo + kChunk);
      std::vector<const GraphSample*> batch;
      batch.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        batch.push_back(&(*samples_)[val_idx_[i]]);
      }
      Tape t;
      const int pred = model_->forward(t, batch, nullptr);
      const Eigen::MatrixXd& p = t.value(pred);
      for (std::size_t i = lo; i < hi; ++i) {
        const double d = p(static_cast<Eigen::Index>(i - lo), 0) -
                         yval_(static_cast<Eigen::Index>(i));
        sse += d * d;
      }
    }
    return sse / static_cast<double>(val_idx_.size());
  }

  std::vector<Eigen::MatrixXd*> parameters() override {
    return model_->parameters();
  }

 private:
  GnnModel* model_;
  const std::vector<GraphSample>* samples_;
  std::vector<int> train_idx_, val_idx_;
  Eigen::VectorXd ytr_, yval_;
};

Eigen::VectorXd predict_graphs(GnnModel& model,
                               const std::vector<GraphSample>& samples,
                               const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = model.predict(samples[idx[i]]);
  }
  return out;
}

}  // namespace

GnnOutcome run_gnn(const LabeledSet& pool, const LabeledSet& hidden,
                   const GnnRunConfig& cfg) {
  const int n = static_cast<int>(pool.records.size());
  if (n < 4) throw EmptyRange("training pool too small");
  if (hidden.records.empty()) throw EmptyRange("hidden test set is empty");
  const int n_val =
      cfg.n_val > 0 ? cfg.n_val : static_cast<int>(std::lround(0.15 * n));
  if (n_val < 1 || n_val >= n) {
    throw DimensionMismatch("validation size must leave training data");
  }
  const SplitIdx split = split_counts(n, n_val, 0, cfg.seed);

  std::vector<GraphSample> samples;
  samples.reserve(pool.records.size());
  Eigen::VectorXd labels(n);
  for (int i = 0; i < n; ++i) {
    const SampleRecord& rec = pool.records[i];
    samples.push_back(build_graph_sample(rec.to_lattice(), rec.label_pa));
    labels(i) = rec.label_pa;
  }
  std::vector<GraphSample> hidden_samples;
  hidden_samples.reserve(hidden.records.size());
  Eigen::VectorXd hidden_labels(
      static_cast<Eigen::Index>(hidden.records.size()));
  for (std::size_t i = 0; i < hidden.records.size(); ++i) {
    const SampleRecord& rec = hidden.records[i];
    hidden_samples.push_back(build_graph_sample(rec.to_lattice(), rec.label_pa));
    hidden_labels(static_cast<Eigen::Index>(i)) = rec.label_pa;
  }

  GnnOutcome out;
  out.model = GnnModel::make(derive_seed(cfg.seed, seed_stream::kInit));
  {
    long rows_n = 0, rows_e = 0;
    for (int i : split.train) {
      rows_n += samples[i].n_nodes();
      rows_e += 2L * samples[i].n_edges();
    }
    Eigen::MatrixXd node_rows(rows_n, 3), edge_rows(rows_e, 7);
    long at_n = 0, at_e = 0;
    for (int i : split.train) {
      const GraphSample& s = samples[i];
      node_rows.middleRows(at_n, s.n_nodes()) = s.node_feats;
      at_n += s.n_nodes();
      edge_rows.middleRows(at_e, 2L * s.n_edges()) = directed_edge_rows(s);
      at_e += 2L * s.n_edges();
    }
    out.model.node_scaler.fit(node_rows);
    out.model.edge_scaler.fit(edge_rows);
    out.model.target_scaler.fit(take(labels, split.train));
  }

  const auto scale_y = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(out.model.target_scaler.transform(v).col(0));
  };
  GraphRegressor reg(&out.model, &samples, split.train, split.val,
                     scale_y(take(labels, split.train)),
                     scale_y(take(labels, split.val)));
  FitConfig fcfg;
  fcfg.epochs = cfg.epochs;
  fcfg.lr = cfg.lr;
  fcfg.batch_size = cfg.batch_size;
  fcfg.seed = cfg.seed;
  out.fit = fit(reg, fcfg);

  std::vector<int> all_hidden(hidden_samples.size());
  for (std::size_t i = 0; i < all_hidden.size(); ++i) {
    all_hidden[i] = static_cast<int>(i);
  }
  const Eigen::VectorXd ytr = take(labels, split.train);
  const Eigen::VectorXd yva = take(labels, split.val);
  const Eigen::VectorXd ptr = predict_graphs(out.model, samples, split.train);
  const Eigen::VectorXd pva = predict_graphs(out.model, samples, split.val);
  const Eigen::VectorXd pte =
      predict_graphs(out.model, hidden_samples, all_hidden);

  out.r2_train = r2_score(ptr, ytr);
  out.r2_val = r2_score(pva, yva);
  out.r2_test = r2_score(pte, hidden_labels);
  out.loss_train = mse(scale_y(ptr), scale_y(ytr));
  out.loss_test = mse(scale_y(pte), scale_y(hidden_labels));
  append_scatter(out.scatter, "train", ytr, ptr);
  append_scatter(out.scatter, "val", yva, pva);
  append_scatter(out.scatter, "test", hidden_labels, pte);
  return out;
}

std::vector<HistogramRow> limit_histogram(const LabeledSet& set,
                                          const std::vector<int>& slice_counts,
                                          int bins) {
  if (bins < 1) throw EmptyRange("need at least one bin");
  std::vector<HistogramRow> rows;
  for (const int n_s : slice_counts) {
    std::vector<double> values;
    for (const SampleRecord& rec : set.records) {
      const Lattice lat = rec.to_lattice();
      const Eigen::VectorXd areas = slice_areas(lat, n_s).tail(n_s);
      if (areas.minCoeff() <= 0.0) continue;
      values.push_back(
          series_equivalent_ea(rec.young_pa * areas));
    }
    if (values.empty()) continue;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
      rows.push_back({n_s, lo, hi, static_cast<long>(values.size())});
      continue;
    }
    std::vector<long> counts(bins, 0);
    const double width = (hi - lo) / bins;
    for (const double v : values) {
      const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
      ++counts[b];
    }
    for (int b = 0; b < bins; ++b) {
      rows.push_back({n_s, lo + b * width, lo + (b + 1) * width, counts[b]});
    }
  }
  return rows;
}

void write_history_csv(const std::string& path, const FitResult& fit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  out << "epoch,lr,train_loss,val_loss\n";
  for (const EpochStats& e : fit.history) {
    out << e.epoch << ',' << num17(e.lr) << ',' << num17(e.train_loss) << ','
        << num17(e.val_loss) << '\n';
  }
}

void write_scatter_csv(const std::string& path,
                       const std::vector<ScatterRow>& rows, double scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  out << "split,truth,prediction\n";
  for (const ScatterRow& r : rows) {
    out << r.split << ',' << num17(r.truth * scale) << ','
        << num17(r.pred * scale) << '\n';
  }
}

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  out << "n_s,bin_left,bin_right,count\n";
  for (const HistogramRow& r : rows) {
    out << r.n_s << ',' << num17(r.left) << ',' << num17(r.right) << ','
        << r.count << '\n';
  }
}

}  // namespace latticeforge
