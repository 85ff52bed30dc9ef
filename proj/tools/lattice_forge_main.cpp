#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "latticeforge/checkpoint.hpp"
#include "latticeforge/experiments.hpp"
#include "latticeforge/inverse.hpp"
#include "latticeforge/slicing.hpp"

namespace lf = latticeforge;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int workers = 1;
};

std::string dataset_name(std::string path) {
  std::string base = std::filesystem::path(path).filename().string();
  for (const char* suf : {".gz", ".jsonl"}) {
    const std::string s(suf);
    if (base.size() > s.size() &&
        base.compare(base.size() - s.size(), s.size(), s) == 0) {
      base.resize(base.size() - s.size());
    }
  }
  return base;
}

std::string sibling_csv(std::string ckpt_path, const std::string& tag) {
  const std::string suf = ".json";
  if (ckpt_path.size() > suf.size() &&
      ckpt_path.compare(ckpt_path.size() - suf.size(), suf.size(), suf) == 0) {
    ckpt_path.resize(ckpt_path.size() - suf.size());
  }
  return ckpt_path + "." + tag + ".csv";
}

void print_kv(const std::string& k, const std::string& v) {
  std::cout << "  " << k << " = " << v << "\n";
}

struct GenerateOpts {
  long n = 0;
  std::string model = "truss";
  std::string out;
  std::string stream = "dataset";
  int n_free_min = 1, n_free_max = 50;
  double radius_mm = 5.0;
  double young_gpa = 193.0;
  double poisson = 0.3;
  double epsilon = 0.05;
  double edge_m = 1.0;
  int slices = 0;
};

lf::DatasetConfig to_dataset_config(const GenerateOpts& g, const GlobalOpts& go) {
  lf::DatasetConfig cfg;
  cfg.n = static_cast<int>(g.n);
  cfg.model = lf::model_from_name(g.model);
  cfg.global_seed = go.seed;
  cfg.stream = g.stream == "hidden" ? lf::seed_stream::kHiddenTest
                                    : lf::seed_stream::kDataset;
  cfg.n_free_min = g.n_free_min;
  cfg.n_free_max = g.n_free_max;
  cfg.radius_m = g.radius_mm * 1e-3;
  cfg.young_pa = g.young_gpa * 1e9;
  cfg.poisson = g.poisson;
  cfg.domain_edge = g.edge_m;
  cfg.epsilon = g.epsilon;
  cfg.workers = go.workers;
  return cfg;
}

int cmd_generate(const GenerateOpts& g, const GlobalOpts& go) {
  const lf::DatasetConfig cfg = to_dataset_config(g, go);
  std::cout << "config:\n";
  print_kv("command", "generate");
  print_kv("n", std::to_string(cfg.n));
  print_kv("model", g.model);
  print_kv("seed", std::to_string(cfg.global_seed));
  print_kv("stream", g.stream);
  print_kv("n_free", std::to_string(cfg.n_free_min) + ".." +
                         std::to_string(cfg.n_free_max));
  print_kv("radius_mm", lf::num17(g.radius_mm));
  print_kv("young_gpa", lf::num17(g.young_gpa));
  print_kv("poisson", lf::num17(g.poisson));
  print_kv("epsilon", lf::num17(g.epsilon));
  print_kv("edge_m", lf::num17(g.edge_m));
  print_kv("slices", std::to_string(g.slices));
  print_kv("workers", std::to_string(cfg.workers));
  print_kv("out", g.out);

  lf::LabeledSet set = lf::generate_labeled(cfg);
  if (g.slices > 0) lf::attach_slice_features(set, g.slices);
  set.manifest.name = dataset_name(g.out);
  lf::export_jsonl(g.out, set);
  std::cout << "kept " << set.manifest.kept << " of "
            << set.manifest.requested << " attempts (singular "
            << set.manifest.discarded_singular << ", degenerate "
            << set.manifest.discarded_degenerate << ")\n";
  if (g.slices > 0) {
    std::cout << "zero-area flagged: " << set.manifest.flagged_zero_area
              << "\n";
  }
  std::cout << "wrote " << g.out << "\n";
  return 0;
}

struct TrainOpts {
  std::string experiment;
  std::string data;
  std::string mode = "desk";
  std::string out;
  int epochs = 0;    // 0 resolves from mode
  long rows = 0;     // toy only
  int val_n = 0;     // gnn only
  int hidden_n = 0;  // gnn only
  int batch = -1;    // -1 resolves from experiment
  double lr = 0.0;   // 0 resolves from experiment
};

void print_metrics(const lf::FitResult& fit, double loss_train,
                   double loss_test, double r2_train, double r2_val,
                   double r2_test) {
  std::cout << "stopped at epoch " << fit.history.back().epoch << " (best "
            << fit.best_epoch << ", val " << lf::num17(fit.best_val) << ")\n";
  std::cout << "train loss = " << lf::num17(loss_train) << "\n";
  std::cout << "test loss  = " << lf::num17(loss_test) << "\n";
  std::cout << "r2 train = " << lf::num17(r2_train) << "\n";
  std::cout << "r2 val   = " << lf::num17(r2_val) << "\n";
  std::cout << "r2 test  = " << lf::num17(r2_test) << "\n";
}

int cmd_train(const TrainOpts& t, const GlobalOpts& go) {
  const bool paper = t.mode == "paper";
  std::cout << "config:\n";
  print_kv("command", "train " + t.experiment);
  print_kv("mode", t.mode);
  print_kv("seed", std::to_string(go.seed));
  print_kv("out", t.out);

  if (t.experiment == "dnn-toy") {
    lf::ToyConfig cfg;
    cfg.rows = t.rows > 0 ? static_cast<int>(t.rows)
                          : (paper ? 20000 * cfg.n_springs : 50000);
    cfg.epochs = t.epochs > 0 ? t.epochs : (paper ? 2000 : 500);
    cfg.lr = t.lr > 0 ? t.lr : (paper ? 1e-3 : 1e-2);
    cfg.batch_size = t.batch >= 0 ? t.batch : 0;
    cfg.seed = go.seed;
    print_kv("rows", std::to_string(cfg.rows));
    print_kv("epochs", std::to_string(cfg.epochs));
    print_kv("lr", lf::num17(cfg.lr));
    print_kv("batch", cfg.batch_size == 0 ? std::string("full")
                                          : std::to_string(cfg.batch_size));
    if (!paper) {
      std::cout << "desk mode: rows " << cfg.rows << " (paper "
                << 20000 * cfg.n_springs << "), epochs " << cfg.epochs
                << " (paper 2000), lr " << cfg.lr << " (paper 0.001)\n";
    }
    const lf::DnnOutcome out = lf::run_toy(cfg);
    lf::CheckpointMeta meta;
    meta.kind = "dnn-toy";
    meta.seed = cfg.seed;
    meta.epochs = cfg.epochs;
    meta.lr = cfg.lr;
    meta.batch_size = cfg.batch_size;
    meta.best_val = out.fit.best_val;
    meta.best_epoch = out.fit.best_epoch;
    meta.n_slices = cfg.n_springs;
    lf::save_mlp(t.out, out.mlp, out.input, out.target, meta);
    lf::write_history_csv(sibling_csv(t.out, "history"), out.fit);
    print_metrics(out.fit, out.loss_train, out.loss_test, out.r2_train,
                  out.r2_val, out.r2_test);
    return 0;
  }

  if (t.data.empty()) {
    std::cerr << "train " << t.experiment << " requires --data\n";
    return 2;
  }
  lf::LabeledSet data = lf::load_jsonl(t.data);
  if (data.records.empty()) throw lf::EmptyRange("dataset file has no records");
  print_kv("data", t.data);
  print_kv("records", std::to_string(data.records.size()));

  if (t.experiment == "dnn-slice") {
    lf::SliceConfig cfg;
    cfg.epochs = t.epochs > 0 ? t.epochs : (paper ? 2000 : 500);
    cfg.lr = t.lr > 0 ? t.lr : 1e-3;
    cfg.batch_size = t.batch >= 0 ? t.batch : 128;
    cfg.seed = go.seed;
    print_kv("n_s", std::to_string(cfg.n_s));
    print_kv("epochs", std::to_string(cfg.epochs));
    print_kv("lr", lf::num17(cfg.lr));
    print_kv("batch", std::to_string(cfg.batch_size));
    if (!paper) {
      std::cout << "desk mode: epochs " << cfg.epochs
                << " (paper 2000), dataset as provided (paper 10000 records)\n";
    }
    const lf::SliceOutcome res = lf::run_slice(data, cfg);
    if (res.excluded > 0) {
      std::cout << "excluded " << res.excluded << " zero-area records\n";
    }
    lf::CheckpointMeta meta;
    meta.kind = "dnn-slice";
    meta.seed = cfg.seed;
    meta.epochs = cfg.epochs;
    meta.lr = cfg.lr;
    meta.batch_size = cfg.batch_size;
    meta.best_val = res.out.fit.best_val;
    meta.best_epoch = res.out.fit.best_epoch;
    meta.n_slices = cfg.n_s;
    lf::save_mlp(t.out, res.out.mlp, res.out.input, res.out.target, meta);
    lf::write_history_csv(sibling_csv(t.out, "history"), res.out.fit);
    print_metrics(res.out.fit, res.out.loss_train, res.out.loss_test,
                  res.out.r2_train, res.out.r2_val, res.out.r2_test);
    return 0;
  }

  // gnn
  const int n_pool = static_cast<int>(data.records.size());
  lf::GnnRunConfig cfg;
  cfg.epochs = t.epochs > 0 ? t.epochs : (paper ? 10000 : 2000);
  cfg.lr = t.lr > 0 ? t.lr : 1e-2;
  cfg.batch_size = t.batch > 0 ? t.batch : 32;
  cfg.seed = go.seed;
  cfg.n_val = t.val_n > 0
                  ? t.val_n
                  : (paper ? static_cast<int>(std::lround(0.15 * n_pool)) : 600);
  const int hidden_n =
      t.hidden_n > 0
          ? t.hidden_n
          : (paper ? static_cast<int>(std::lround(0.10 * n_pool)) : 400);

  const lf::SampleRecord& first = data.records.front();
  lf::DatasetConfig hcfg;
  hcfg.n = hidden_n;
  hcfg.model = first.model;
  hcfg.global_seed = go.seed;
  hcfg.stream = lf::seed_stream::kHiddenTest;
  hcfg.radius_m = first.radius_m;
  hcfg.young_pa = first.young_pa;
  hcfg.poisson = first.poisson;
  hcfg.domain_edge = first.domain_edge;
  hcfg.workers = go.workers;

  print_kv("model", lf::model_name(first.model));
  print_kv("epochs", std::to_string(cfg.epochs));
  print_kv("lr", lf::num17(cfg.lr));
  print_kv("batch", std::to_string(cfg.batch_size));
  print_kv("val_n", std::to_string(cfg.n_val));
  print_kv("hidden_n", std::to_string(hidden_n));
  if (!paper) {
    std::cout << "desk mode: epochs " << cfg.epochs
              << " (paper 10000), val " << cfg.n_val
              << " (paper 15% of pool), hidden " << hidden_n
              << " (paper 10% of pool)\n";
  }

  const lf::LabeledSet hidden = lf::generate_labeled(hcfg);
  const lf::GnnOutcome out = lf::run_gnn(data, hidden, cfg);
  lf::CheckpointMeta meta;
  meta.kind = "gnn-" + lf::model_name(first.model);
  meta.seed = cfg.seed;
  meta.epochs = cfg.epochs;
  meta.lr = cfg.lr;
  meta.batch_size = cfg.batch_size;
  meta.best_val = out.fit.best_val;
  meta.best_epoch = out.fit.best_epoch;
  meta.n_val = cfg.n_val;
  lf::save_gnn(t.out, out.model, meta);
  lf::write_history_csv(sibling_csv(t.out, "history"), out.fit);
  print_metrics(out.fit, out.loss_train, out.loss_test, out.r2_train,
                out.r2_val, out.r2_test);
  return 0;
}

struct PredictOpts {
  std::string ckpt;
  std::string lattice_file;
  long index = 0;
  std::uint64_t sample_seed = 0;
  bool has_sample_seed = false;
};

double predict_record_mlp(lf::MlpCheckpoint& ck, const lf::Lattice& lat) {
  const lf::InverseAreas ia =
      lf::inverse_areas(lf::slice_areas(lat, ck.meta.n_slices));
  lf::Tape t;
  const int pred = ck.mlp.forward(
      t, t.constant(ck.input.transform(ia.inv.transpose())), nullptr);
  const double e_per_vol = ck.target.inverse(t.value(pred))(0, 0);
  return e_per_vol * lf::lattice_volume(lat);
}

int cmd_predict(const PredictOpts& p, const GlobalOpts& go) {
  std::cout << "config:\n";
  print_kv("command", "predict");
  print_kv("ckpt", p.ckpt);
  print_kv("seed", std::to_string(go.seed));

  const lf::CheckpointMeta meta = lf::peek_checkpoint(p.ckpt);
  const bool is_gnn = meta.kind.rfind("gnn", 0) == 0;
  if (!is_gnn && meta.kind != "dnn-slice") {
    throw lf::SchemaMismatch("checkpoint kind " + meta.kind +
                             " cannot predict a lattice");
  }

  lf::Lattice lat;
  bool has_label = false;
  double label = 0.0;
  if (p.has_sample_seed) {
    print_kv("sample_seed", std::to_string(p.sample_seed));
    lf::DatasetConfig cfg;
    cfg.n = 1;
    cfg.global_seed = go.seed;
    lat = lf::lattice_from_sample_seed(cfg, p.sample_seed);
  } else if (!p.lattice_file.empty()) {
    print_kv("lattice_file", p.lattice_file);
    print_kv("index", std::to_string(p.index));
    const lf::LabeledSet set = lf::load_jsonl(p.lattice_file);
    if (p.index < 0 || p.index >= static_cast<long>(set.records.size())) {
      throw lf::EmptyRange("record index out of range");
    }
    const lf::SampleRecord& rec = set.records[p.index];
    lat = rec.to_lattice();
    has_label = true;
    label = rec.label_pa;
  } else {
    std::cerr << "predict needs --lattice-file or --sample-seed\n";
    return 2;
  }

  double pred = 0.0;
  if (is_gnn) {
    lf::GnnCheckpoint ck = lf::load_gnn(p.ckpt);
    pred = ck.model.predict(lf::build_graph_sample(lat));
  } else {
    lf::MlpCheckpoint ck = lf::load_mlp(p.ckpt);
    pred = predict_record_mlp(ck, lat);
  }
  std::cout << "prediction: " << lf::num17(pred / 1e6) << " MPa\n";
  if (has_label) {
    std::cout << "label:      " << lf::num17(label / 1e6) << " MPa\n";
  }
  return 0;
}

struct InverseOpts {
  std::string ckpt;
  long n = 100000;
  double target_mpa = 170.0;
  double band_mpa = 1.0;
  bool validate = false;
  std::string out;
  int n_free_min = 1, n_free_max = 50;
};

int cmd_inverse(const InverseOpts& iv, const GlobalOpts& go) {
  std::cout << "config:\n";
  print_kv("command", "inverse");
  print_kv("ckpt", iv.ckpt);
  print_kv("n", std::to_string(iv.n));
  print_kv("target_mpa", lf::num17(iv.target_mpa));
  print_kv("band_mpa", lf::num17(iv.band_mpa));
  print_kv("seed", std::to_string(go.seed));
  print_kv("workers", std::to_string(go.workers));

  lf::GnnCheckpoint ck = lf::load_gnn(iv.ckpt);
  lf::DatasetConfig cfg;
  cfg.n = static_cast<int>(iv.n);
  cfg.model = lf::model_from_name(ck.meta.kind.substr(4));
  cfg.global_seed = go.seed;
  cfg.stream = lf::seed_stream::kInverseDb;
  cfg.n_free_min = iv.n_free_min;
  cfg.n_free_max = iv.n_free_max;
  cfg.workers = go.workers;

  const lf::InverseDb db = lf::build_design_db(cfg, ck.model);
  std::cout << "database: " << db.points.size() << " designs ("
            << db.discarded << " discarded of " << db.requested
            << " attempts)\n";
  const std::vector<int> front = lf::pareto_front(db.points);
  std::cout << "pareto front: " << front.size() << " designs\n";
  if (!iv.out.empty()) {
    lf::write_design_csv(iv.out, db.points, front);
    std::cout << "wrote " << iv.out << "\n";
  }

  const double lo = (iv.target_mpa - iv.band_mpa) * 1e6;
  const double hi = (iv.target_mpa + iv.band_mpa) * 1e6;
  lf::QueryResult q;
  try {
    q = lf::local_query(db.points, lo, hi);
  } catch (const lf::EmptyRange&) {
    double best_gap = std::numeric_limits<double>::infinity();
    double nearest = 0.0;
    for (const lf::DesignPoint& p : db.points) {
      const double gap = std::abs(p.e_pred - iv.target_mpa * 1e6);
      if (gap < best_gap) {
        best_gap = gap;
        nearest = p.e_pred;
      }
    }
    std::cerr << "no design inside [" << lf::num17(lo / 1e6) << ", "
              << lf::num17(hi / 1e6) << "] MPa; nearest prediction is "
              << lf::num17(nearest / 1e6) << " MPa (band of at least "
              << lf::num17(best_gap / 1e6) << " MPa reaches it)\n";
    return 3;
  }
  const lf::DesignPoint& best = db.points[q.best];
  std::cout << "band candidates: " << q.in_band.size() << "\n";
  std::cout << "candidate: id " << best.id << ", seed " << best.seed
            << ", n_free " << best.n_free << ", volume "
            << lf::num17(best.volume) << " m^3, predicted "
            << lf::num17(best.e_pred / 1e6) << " MPa\n";
  if (iv.validate) {
    const lf::Lattice lat = lf::regenerate_candidate(best, cfg);
    const lf::UniaxialResult res = lf::solve_lattice(lat, cfg.model);
    const double rel = std::abs(res.e_eq - best.e_pred) / res.e_eq;
    std::cout << "ground truth: " << lf::num17(res.e_eq / 1e6)
              << " MPa, relative error " << lf::num17(rel) << "\n";
  }
  return 0;
}

struct ExportOpts {
  std::string kind;
  std::string ckpt;
  std::string data;
  std::string out;
  long rows = 0;
  int bins = 40;
};

int cmd_export_plot(const ExportOpts& ex, const GlobalOpts& go) {
  std::cout << "config:\n";
  print_kv("command", "export-plot " + ex.kind);
  print_kv("out", ex.out);
  print_kv("seed", std::to_string(go.seed));

  if (ex.kind == "toy-scatter") {
    if (ex.ckpt.empty()) {
      std::cerr << "toy-scatter requires --ckpt\n";
      return 2;
    }
    lf::MlpCheckpoint ck = lf::load_mlp(ex.ckpt);
    if (ck.meta.kind != "dnn-toy") {
      throw lf::SchemaMismatch("toy-scatter needs a dnn-toy checkpoint");
    }
    lf::ToyConfig cfg;
    cfg.rows = ex.rows > 0 ? static_cast<int>(ex.rows) : 50000;
    cfg.n_springs = ck.meta.n_slices;
    cfg.seed = ck.meta.seed;
    print_kv("rows", std::to_string(cfg.rows));
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    lf::toy_data(cfg, x, y);
    const lf::SplitIdx split =
        lf::split_dataset(cfg.rows, 0.15 * 0.85, 0.15, cfg.seed);
    lf::Tape t;
    const int pred =
        ck.mlp.forward(t, t.constant(ck.input.transform(x)), nullptr);
    const Eigen::VectorXd p = ck.target.inverse(t.value(pred)).col(0);
    std::vector<lf::ScatterRow> rows;
    const std::pair<const char*, const std::vector<int>*> groups[] = {
        {"train", &split.train}, {"val", &split.val}, {"test", &split.test}};
    for (const auto& [name, idx] : groups) {
      for (int i : *idx) rows.push_back({name, y(i), p(i)});
    }
    lf::write_scatter_csv(ex.out, rows);
    std::cout << "wrote " << ex.out << "\n";
    return 0;
  }

  if (ex.kind == "slice-histogram") {
    if (ex.data.empty()) {
      std::cerr << "slice-histogram requires --data\n";
      return 2;
    }
    print_kv("data", ex.data);
    print_kv("bins", std::to_string(ex.bins));
    const lf::LabeledSet set = lf::load_jsonl(ex.data);
    const auto rows = lf::limit_histogram(set, {9, 19, 49, 99}, ex.bins);
    lf::write_histogram_csv(ex.out, rows);
    std::cout << "wrote " << ex.out << "\n";
    return 0;
  }

  if (ex.kind == "pred-scatter") {
    if (ex.ckpt.empty() || ex.data.empty()) {
      std::cerr << "pred-scatter requires --ckpt and --data\n";
      return 2;
    }
    print_kv("ckpt", ex.ckpt);
    print_kv("data", ex.data);
    const lf::LabeledSet set = lf::load_jsonl(ex.data);
    const int n = static_cast<int>(set.records.size());
    if (n == 0) throw lf::EmptyRange("dataset file has no records");
    const lf::CheckpointMeta meta = lf::peek_checkpoint(ex.ckpt);
    std::vector<std::string> labels(n, "data");
    if (meta.kind.rfind("gnn", 0) == 0 && meta.n_val > 0 && meta.n_val < n) {
      const lf::SplitIdx split = lf::split_counts(n, meta.n_val, 0, meta.seed);
      for (int i : split.val) labels[i] = "val";
      for (int i : split.train) labels[i] = "train";
    }
    std::vector<lf::ScatterRow> rows;
    if (meta.kind.rfind("gnn", 0) == 0) {
      lf::GnnCheckpoint ck = lf::load_gnn(ex.ckpt);
      for (int i = 0; i < n; ++i) {
        const lf::SampleRecord& rec = set.records[i];
        const double pred =
            ck.model.predict(lf::build_graph_sample(rec.to_lattice()));
        rows.push_back({labels[i], rec.label_pa, pred});
      }
    } else if (meta.kind == "dnn-slice") {
      lf::MlpCheckpoint ck = lf::load_mlp(ex.ckpt);
      for (int i = 0; i < n; ++i) {
        const lf::SampleRecord& rec = set.records[i];
        rows.push_back(
            {labels[i], rec.label_pa, predict_record_mlp(ck, rec.to_lattice())});
      }
    } else {
      throw lf::SchemaMismatch("pred-scatter needs a lattice model checkpoint");
    }
    lf::write_scatter_csv(ex.out, rows, 1e-6);
    std::cout << "wrote " << ex.out << " (MPa)\n";
    return 0;
  }

  // pareto: filter the on_front rows of a design CSV
  if (ex.data.empty()) {
    std::cerr << "pareto requires --data (a design CSV from inverse)\n";
    return 2;
  }
  print_kv("data", ex.data);
  std::ifstream in(ex.data, std::ios::binary);
  if (!in) throw lf::CorruptRecord(0, "cannot open " + ex.data);
  std::ofstream out(ex.out, std::ios::binary);
  if (!out) throw lf::CorruptRecord(0, "cannot open " + ex.out + " for writing");
  std::string line;
  if (!std::getline(in, line) ||
      line != "id,seed,n_free,volume_m3,inv_volume,e_pred_mpa,on_front") {
    throw lf::CorruptRecord(1, "not a design CSV");
  }
  out << "id,seed,n_free,volume_m3,inv_volume,e_pred_mpa\n";
  std::size_t line_no = 1;
  long kept = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.size() < 2 || line[line.size() - 2] != ',') {
      throw lf::CorruptRecord(line_no, "malformed design row");
    }
    if (line.back() == '1') {
      out << line.substr(0, line.size() - 2) << "\n";
      ++kept;
    } else if (line.back() != '0') {
      throw lf::CorruptRecord(line_no, "on_front flag must be 0 or 1");
    }
  }
  std::cout << "wrote " << ex.out << " (" << kept << " front designs)\n";
  return 0;
}

int cmd_model_info(const std::string& ckpt) {
  const lf::CheckpointMeta meta = lf::peek_checkpoint(ckpt);
  std::cout << "kind: " << meta.kind << "\n";
  std::cout << "seed: " << meta.seed << "\n";
  std::cout << "epochs: " << meta.epochs << " (best " << meta.best_epoch
            << ", best val " << lf::num17(meta.best_val) << ")\n";
  const auto show = [](const std::string& name, const lf::DenseLayer& l) {
    const char* act = l.act == lf::Activation::kSelu
                          ? "selu"
                          : (l.act == lf::Activation::kPrelu ? "prelu"
                                                             : "linear");
    std::cout << "  " << name << ": " << l.in_dim() << " -> " << l.out_dim()
              << " (" << act << ", " << l.n_params() << " params)\n";
  };
  if (meta.kind.rfind("gnn", 0) == 0) {
    lf::GnnCheckpoint ck = lf::load_gnn(ckpt);
    show("node_embed", ck.model.node_embed);
    show("edge_embed", ck.model.edge_embed);
    show("message_1", ck.model.msg1);
    show("update_1", ck.model.upd1);
    show("message_2", ck.model.msg2);
    show("update_2", ck.model.upd2);
    show("head", ck.model.head);
    std::cout << "total parameters: " << ck.model.n_params() << "\n";
  } else {
    lf::MlpCheckpoint ck = lf::load_mlp(ckpt);
    for (std::size_t i = 0; i < ck.mlp.layers.size(); ++i) {
      show("dense_" + std::to_string(i), ck.mlp.layers[i]);
    }
    std::cout << "total parameters: " << ck.mlp.n_params() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aperiodic lattice stiffness surrogates and inverse design"};
  app.require_subcommand(1);
  app.set_config("--config");

  GlobalOpts go;
  go.workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--seed", go.seed, "global seed")
      ->envname("LATTICE_FORGE_SEED");
  app.add_option("--workers", go.workers, "worker threads for generation");

  GenerateOpts g;
  CLI::App* gen = app.add_subcommand("generate", "generate a labeled dataset");
  gen->add_option("--n", g.n, "records to keep")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--model", g.model, "element model")
      ->check(CLI::IsMember({"truss", "beam"}));
  gen->add_option("--out", g.out, "output JSONL path (.gz for gzip)")
      ->required();
  gen->add_option("--stream", g.stream, "seed stream")
      ->check(CLI::IsMember({"dataset", "hidden"}));
  gen->add_option("--n-free-min", g.n_free_min)->check(CLI::PositiveNumber);
  gen->add_option("--n-free-max", g.n_free_max)->check(CLI::PositiveNumber);
  gen->add_option("--radius-mm", g.radius_mm, "strut radius [mm]")
      ->check(CLI::PositiveNumber);
  gen->add_option("--young-gpa", g.young_gpa, "Young's modulus [GPa]")
      ->check(CLI::PositiveNumber);
  gen->add_option("--poisson", g.poisson, "Poisson's ratio");
  gen->add_option("--epsilon", g.epsilon, "joint margin fraction");
  gen->add_option("--edge-m", g.edge_m, "cube edge [m]")
      ->check(CLI::PositiveNumber);
  gen->add_option("--slices", g.slices, "attach 3 n_s slice features");

  TrainOpts t;
  CLI::App* tr = app.add_subcommand("train", "train a surrogate");
  tr->add_option("experiment", t.experiment, "dnn-toy | dnn-slice | gnn")
      ->required()
      ->check(CLI::IsMember({"dnn-toy", "dnn-slice", "gnn"}));
  tr->add_option("--data", t.data, "training dataset (JSONL)");
  tr->add_option("--mode", t.mode, "paper | desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  tr->add_option("--out", t.out, "checkpoint path")->required();
  tr->add_option("--epochs", t.epochs)->check(CLI::NonNegativeNumber);
  tr->add_option("--rows", t.rows, "toy dataset rows")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--val-n", t.val_n, "gnn validation count")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--hidden-n", t.hidden_n, "gnn hidden test count")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--batch", t.batch, "batch size (0 = full)");
  tr->add_option("--lr", t.lr, "learning rate")->check(CLI::NonNegativeNumber);

  PredictOpts p;
  CLI::App* pr = app.add_subcommand("predict", "predict E_z^eq for a lattice");
  pr->add_option("--model-ckpt", p.ckpt)->required();
  pr->add_option("--lattice-file", p.lattice_file, "JSONL dataset");
  pr->add_option("--index", p.index, "record index in --lattice-file");
  pr->add_option("--sample-seed", p.sample_seed,
                 "regenerate the lattice from a per-sample seed");

  InverseOpts iv;
  CLI::App* inv = app.add_subcommand("inverse", "database + pareto + query");
  inv->add_option("--model-ckpt", iv.ckpt)->required();
  inv->add_option("--n", iv.n, "database size")->check(CLI::PositiveNumber);
  inv->add_option("--target-mpa", iv.target_mpa)->check(CLI::PositiveNumber);
  inv->add_option("--band-mpa", iv.band_mpa)->check(CLI::PositiveNumber);
  inv->add_flag("--validate", iv.validate, "re-solve the chosen candidate");
  inv->add_option("--out", iv.out, "design CSV path");
  inv->add_option("--n-free-min", iv.n_free_min)->check(CLI::PositiveNumber);
  inv->add_option("--n-free-max", iv.n_free_max)->check(CLI::PositiveNumber);

  ExportOpts ex;
  CLI::App* xp = app.add_subcommand("export-plot", "write plot data CSVs");
  xp->add_option("kind", ex.kind,
                 "toy-scatter | slice-histogram | pred-scatter | pareto")
      ->required()
      ->check(CLI::IsMember(
          {"toy-scatter", "slice-histogram", "pred-scatter", "pareto"}));
  xp->add_option("--ckpt", ex.ckpt, "model checkpoint");
  xp->add_option("--data", ex.data, "dataset JSONL or design CSV");
  xp->add_option("--out", ex.out, "output CSV")->required();
  xp->add_option("--rows", ex.rows, "toy rows")->check(CLI::NonNegativeNumber);
  xp->add_option("--bins", ex.bins, "histogram bins")
      ->check(CLI::PositiveNumber);

  std::string info_ckpt;
  CLI::App* mi = app.add_subcommand("model-info", "print layer shapes");
  mi->add_option("--model-ckpt", info_ckpt)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  p.has_sample_seed = pr->count("--sample-seed") > 0;

  try {
    if (gen->parsed()) return cmd_generate(g, go);
    if (tr->parsed()) return cmd_train(t, go);
    if (pr->parsed()) return cmd_predict(p, go);
    if (inv->parsed()) return cmd_inverse(iv, go);
    if (xp->parsed()) return cmd_export_plot(ex, go);
    if (mi->parsed()) return cmd_model_info(info_ckpt);
  } catch (const lf::SchemaMismatch& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const lf::CorruptRecord& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const lf::EmptyRange& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
