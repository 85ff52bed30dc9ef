#include "latticeforge/dataset.hpp"

#include <zlib.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

#include "latticeforge/lattice_gen.hpp"
#include "latticeforge/slicing.hpp"

namespace latticeforge {

using nlohmann::json;

std::string model_name(ElementModel m) {
  return m == ElementModel::kTruss ? "truss" : "beam";
}

ElementModel model_from_name(const std::string& name) {
  if (name == "truss") return ElementModel::kTruss;
  if (name == "beam") return ElementModel::kBeam;
  throw SchemaMismatch("unknown model kind: " + name);
}

Lattice SampleRecord::to_lattice() const {
  Lattice lat;
  lat.nodes = nodes;
  lat.edges = edges;
  lat.section = SectionSpec::circular(radius_m);
  lat.material = MaterialSpec{young_pa, poisson};
  lat.domain_edge = domain_edge;
  return lat;
}

Lattice lattice_from_sample_seed(const DatasetConfig& cfg,
                                 std::uint64_t sample_seed, int* n_free_out) {
  std::mt19937_64 r(sample_seed);
  GenConfig gc;
  gc.n_free = uniform_int_in(r, cfg.n_free_min, cfg.n_free_max);
  gc.epsilon = cfg.epsilon;
  gc.seed = r();
  gc.domain_edge = cfg.domain_edge;
  if (n_free_out) *n_free_out = gc.n_free;
  return generate_lattice(gc, SectionSpec::circular(cfg.radius_m),
                          MaterialSpec{cfg.young_pa, cfg.poisson});
}

namespace {

enum class Outcome { kKept, kSingular, kDegenerate };

struct Attempt {
  Outcome outcome = Outcome::kDegenerate;
  SampleRecord record;
};

Attempt generate_one(const DatasetConfig& cfg, std::uint64_t sample_seed) {
  Attempt out;
  try {
    int n_free = 0;
    const Lattice lat = lattice_from_sample_seed(cfg, sample_seed, &n_free);
    const UniaxialResult res = solve_lattice(lat, cfg.model);
    SampleRecord& rec = out.record;
    rec.seed = sample_seed;
    rec.n_free = n_free;
    rec.nodes = lat.nodes;
    rec.edges = lat.edges;
    rec.radius_m = cfg.radius_m;
    rec.young_pa = cfg.young_pa;
    rec.poisson = cfg.poisson;
    rec.domain_edge = cfg.domain_edge;
    rec.model = cfg.model;
    rec.label_pa = res.e_eq;
    rec.volume_m3 = res.volume;
    out.outcome = Outcome::kKept;
  } catch (const SingularSystem&) {
    out.outcome = Outcome::kSingular;
  } catch (const GenerationFailed&) {
    out.outcome = Outcome::kDegenerate;
  }
  return out;
}

void run_wave(const DatasetConfig& cfg, std::uint64_t first_index,
              std::vector<Attempt>& wave) {
  const int workers = std::max(1, cfg.workers);
  if (workers == 1 || wave.size() < 2) {
    for (std::size_t k = 0; k < wave.size(); ++k) {
      wave[k] = generate_one(
          cfg, derive_seed(cfg.global_seed, cfg.stream, first_index + k));
    }
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (wave.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(wave.size(), lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t k = lo; k < hi; ++k) {
        wave[k] = generate_one(
            cfg, derive_seed(cfg.global_seed, cfg.stream, first_index + k));
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

LabeledSet generate_labeled(const DatasetConfig& cfg) {
  if (cfg.n < 1) throw EmptyRange("dataset size must be positive");
  if (cfg.n_free_min < 1 || cfg.n_free_min > cfg.n_free_max) {
    throw DegenerateInput("invalid joint count range");
  }
  LabeledSet set;
  set.manifest.model = model_name(cfg.model);
  set.manifest.global_seed = cfg.global_seed;
  set.manifest.stream = cfg.stream;

  std::uint64_t next_index = 0;
  while (set.manifest.kept < cfg.n) {
    const long missing = cfg.n - set.manifest.kept;
    std::vector<Attempt> wave(static_cast<std::size_t>(missing + missing / 8 + 4));
    run_wave(cfg, next_index, wave);
    for (Attempt& a : wave) {
      ++set.manifest.requested;
      if (a.outcome == Outcome::kKept) {
        a.record.id = set.manifest.kept;
        set.records.push_back(std::move(a.record));
        if (++set.manifest.kept == cfg.n) break;
      } else if (a.outcome == Outcome::kSingular) {
        ++set.manifest.discarded_singular;
      } else {
        ++set.manifest.discarded_degenerate;
      }
    }
    next_index += wave.size();
  }
  return set;
}

void attach_slice_features(LabeledSet& set, int n_s) {
  set.manifest.flagged_zero_area = 0;
  for (SampleRecord& rec : set.records) {
    const Lattice lat = rec.to_lattice();
    const InverseAreas inv = inverse_areas(slice_areas(lat, n_s));
    rec.slice_inv_areas = inv.inv;
    rec.zero_area = inv.zero_area;
    rec.e_per_volume = rec.label_pa / rec.volume_m3;
    if (inv.zero_area) ++set.manifest.flagged_zero_area;
  }
}

SplitIdx split_counts(int n, int n_val, int n_test, std::uint64_t seed) {
  if (n_val < 0 || n_test < 0 || n_val + n_test > n) {
    throw DimensionMismatch("split sizes exceed the dataset");
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(derive_seed(seed, seed_stream::kSplit));
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_int_in(rng, 0, i)]);
  }
  SplitIdx s;
  s.test.assign(order.begin(), order.begin() + n_test);
  s.val.assign(order.begin() + n_test, order.begin() + n_test + n_val);
  s.train.assign(order.begin() + n_test + n_val, order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

SplitIdx split_dataset(int n, double val_frac, double test_frac,
                       std::uint64_t seed) {
  if (val_frac < 0 || test_frac < 0 || val_frac + test_frac >= 1.0) {
    throw DimensionMismatch("split fractions must lie in [0, 1)");
  }
  return split_counts(n, static_cast<int>(std::lround(val_frac * n)),
                      static_cast<int>(std::lround(test_frac * n)), seed);
}

namespace {

struct LineWriter {
  virtual ~LineWriter() = default;
  virtual void line(const std::string& s) = 0;
};

struct PlainWriter : LineWriter {
  std::ofstream out;
  explicit PlainWriter(const std::string& path) : out(path, std::ios::binary) {
    if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  }
  void line(const std::string& s) override { out << s << '\n'; }
};

struct GzWriter : LineWriter {
  gzFile f;
  explicit GzWriter(const std::string& path)
      : f(gzopen(path.c_str(), "wb")) {
    if (!f) throw CorruptRecord(0, "cannot open " + path + " for writing");
  }
  ~GzWriter() override {
    if (f) gzclose(f);
  }
  void line(const std::string& s) override {
    const std::string with_nl = s + "\n";
    if (gzwrite(f, with_nl.data(), static_cast<unsigned>(with_nl.size())) !=
        static_cast<int>(with_nl.size())) {
      throw CorruptRecord(0, "gzip write failed");
    }
  }
};

struct LineReader {
  virtual ~LineReader() = default;
  virtual bool line(std::string& out) = 0;
};

struct PlainReader : LineReader {
  std::ifstream in;
  explicit PlainReader(const std::string& path) : in(path, std::ios::binary) {
    if (!in) throw CorruptRecord(0, "cannot open " + path);
  }
  bool line(std::string& out) override {
    return static_cast<bool>(std::getline(in, out));
  }
};

struct GzReader : LineReader {
  gzFile f;
  explicit GzReader(const std::string& path) : f(gzopen(path.c_str(), "rb")) {
    if (!f) throw CorruptRecord(0, "cannot open " + path);
  }
  ~GzReader() override {
    if (f) gzclose(f);
  }
  bool line(std::string& out) override {
    out.clear();
    char buf[1 << 16];
    while (true) {
      if (gzgets(f, buf, sizeof buf) == nullptr) return !out.empty();
      out += buf;
      if (!out.empty() && out.back() == '\n') {
        out.pop_back();
        return true;
      }
    }
  }
};

bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string manifest_path(std::string path) {
  if (has_suffix(path, ".gz")) path.resize(path.size() - 3);
  if (has_suffix(path, ".jsonl")) path.resize(path.size() - 6);
  return path + ".manifest.json";
}

json manifest_to_json(const Manifest& m) {
  json j;
  j["schema"] = kSchemaTag;
  j["name"] = m.name;
  j["model"] = m.model;
  j["global_seed"] = m.global_seed;
  j["stream"] = m.stream;
  j["requested"] = m.requested;
  j["kept"] = m.kept;
  j["discarded_singular"] = m.discarded_singular;
  j["discarded_degenerate"] = m.discarded_degenerate;
  j["flagged_zero_area"] = m.flagged_zero_area;
  j["split_train"] = m.split_train;
  j["split_val"] = m.split_val;
  j["split_test"] = m.split_test;
  j["scaler_stats"] = m.scaler_stats;
  j["units"] = m.units;
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  if (j.value("schema", "") != kSchemaTag) {
    throw SchemaMismatch("manifest schema is not " + std::string(kSchemaTag));
  }
  m.name = j.value("name", "");
  m.model = j.at("model").get<std::string>();
  m.global_seed = j.at("global_seed").get<std::uint64_t>();
  m.stream = j.at("stream").get<std::uint64_t>();
  m.requested = j.at("requested").get<long>();
  m.kept = j.at("kept").get<long>();
  m.discarded_singular = j.at("discarded_singular").get<long>();
  m.discarded_degenerate = j.at("discarded_degenerate").get<long>();
  m.flagged_zero_area = j.at("flagged_zero_area").get<long>();
  m.split_train = j.value("split_train", -1L);
  m.split_val = j.value("split_val", -1L);
  m.split_test = j.value("split_test", -1L);
  m.scaler_stats = j.value("scaler_stats", "");
  m.units = j.value("units", "SI");
  return m;
}

json record_to_json(const SampleRecord& r) {
  json j;
  j["id"] = r.id;
  j["seed"] = r.seed;
  j["n_free"] = r.n_free;
  json nodes = json::array();
  for (const Vec3& p : r.nodes) nodes.push_back({p.x(), p.y(), p.z()});
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& [a, b] : r.edges) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["radius_m"] = r.radius_m;
  j["young_pa"] = r.young_pa;
  j["poisson"] = r.poisson;
  j["domain_edge"] = r.domain_edge;
  j["model"] = model_name(r.model);
  j["label_pa"] = r.label_pa;
  j["volume_m3"] = r.volume_m3;
  if (r.slice_inv_areas.size() > 0) {
    json inv = json::array();
    for (Eigen::Index i = 0; i < r.slice_inv_areas.size(); ++i) {
      inv.push_back(r.slice_inv_areas(i));
    }
    j["slice_inv_areas"] = std::move(inv);
    j["e_per_volume"] = r.e_per_volume;
    j["zero_area"] = r.zero_area;
  }
  return j;
}

void validate_record(const SampleRecord& r) {
  const int n = static_cast<int>(r.nodes.size());
  if (n < 9) throw SchemaMismatch("record needs the 8 corners plus a joint");
  if (r.n_free != n - 8) throw SchemaMismatch("n_free disagrees with nodes");
  if (!(r.domain_edge > 0.0)) throw SchemaMismatch("bad domain edge");
  const auto corners = cube_corners(r.domain_edge);
  for (int c = 0; c < 8; ++c) {
    if ((r.nodes[c] - corners[c]).norm() > 1e-12 * r.domain_edge) {
      throw SchemaMismatch("corner nodes out of place");
    }
  }
  for (const Vec3& p : r.nodes) {
    if (!p.allFinite() || p.minCoeff() < -1e-12 ||
        p.maxCoeff() > r.domain_edge * (1.0 + 1e-12)) {
      throw SchemaMismatch("node outside the domain");
    }
  }
  Edge prev{-1, -1};
  for (const auto& e : r.edges) {
    if (e.first < 0 || e.second >= n || e.first >= e.second) {
      throw SchemaMismatch("malformed edge");
    }
    if (!(prev < e)) throw SchemaMismatch("edges not sorted unique");
    prev = e;
  }
  const Lattice lat = r.to_lattice();
  if (!lat.connected()) throw SchemaMismatch("disconnected lattice");
  if (!lat.section.consistent()) throw SchemaMismatch("inconsistent section");
  if (!lat.material.valid()) throw SchemaMismatch("invalid material");
  if (!(r.label_pa > 0.0) || !std::isfinite(r.label_pa)) {
    throw SchemaMismatch("label must be positive and finite");
  }
  const double vol = lattice_volume(lat);
  if (std::abs(vol - r.volume_m3) > 1e-12 * std::max(vol, r.volume_m3)) {
    throw SchemaMismatch("stored volume disagrees with geometry");
  }
  if (r.slice_inv_areas.size() > 0) {
    if (r.slice_inv_areas.size() % 3 != 0) {
      throw SchemaMismatch("slice feature count not divisible by 3");
    }
    const double back = r.e_per_volume * r.volume_m3;
    if (std::abs(back - r.label_pa) > 1e-12 * r.label_pa) {
      throw SchemaMismatch("per-volume target disagrees with label");
    }
  }
}

SampleRecord record_from_json(const json& j) {
  SampleRecord r;
  r.id = j.at("id").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_free = j.at("n_free").get<int>();
  for (const auto& p : j.at("nodes")) {
    if (!p.is_array() || p.size() != 3) {
      throw SchemaMismatch("node is not a coordinate triple");
    }
    r.nodes.emplace_back(p[0].get<double>(), p[1].get<double>(),
                         p[2].get<double>());
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) {
      throw SchemaMismatch("edge is not an index pair");
    }
    r.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  r.radius_m = j.at("radius_m").get<double>();
  r.young_pa = j.at("young_pa").get<double>();
  r.poisson = j.at("poisson").get<double>();
  r.domain_edge = j.at("domain_edge").get<double>();
  r.model = model_from_name(j.at("model").get<std::string>());
  r.label_pa = j.at("label_pa").get<double>();
  r.volume_m3 = j.at("volume_m3").get<double>();
  if (j.contains("slice_inv_areas")) {
    const auto& inv = j.at("slice_inv_areas");
    r.slice_inv_areas.resize(static_cast<Eigen::Index>(inv.size()));
    for (std::size_t i = 0; i < inv.size(); ++i) {
      r.slice_inv_areas(static_cast<Eigen::Index>(i)) = inv[i].get<double>();
    }
    r.e_per_volume = j.at("e_per_volume").get<double>();
    r.zero_area = j.at("zero_area").get<bool>();
  }
  validate_record(r);
  return r;
}

}  // namespace

void export_jsonl(const std::string& path, const LabeledSet& set) {
  std::unique_ptr<LineWriter> w;
  if (has_suffix(path, ".gz")) {
    w = std::make_unique<GzWriter>(path);
  } else {
    w = std::make_unique<PlainWriter>(path);
  }
  json header;
  header["schema"] = kSchemaTag;
  header["units"] = set.manifest.units;
  w->line(header.dump());
  for (const SampleRecord& r : set.records) w->line(record_to_json(r).dump());

  std::ofstream mf(manifest_path(path), std::ios::binary);
  if (!mf) throw CorruptRecord(0, "cannot write manifest for " + path);
  mf << manifest_to_json(set.manifest).dump(2) << '\n';
}

LabeledSet load_jsonl(const std::string& path) {
  std::unique_ptr<LineReader> rd;
  if (has_suffix(path, ".gz")) {
    rd = std::make_unique<GzReader>(path);
  } else {
    rd = std::make_unique<PlainReader>(path);
  }
  LabeledSet set;
  std::string line;
  std::size_t line_no = 1;
  if (!rd->line(line)) throw CorruptRecord(1, "missing schema header");
  try {
    const json header = json::parse(line);
    const std::string schema = header.value("schema", "");
    if (schema != kSchemaTag) {
      throw SchemaMismatch("unsupported schema: " +
                           (schema.empty() ? "<missing>" : schema));
    }
    set.manifest.units = header.value("units", "SI");
  } catch (const json::exception& e) {
    throw CorruptRecord(1, e.what());
  }
  while (rd->line(line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      set.records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw CorruptRecord(line_no, e.what());
    } catch (const SchemaMismatch& e) {
      throw CorruptRecord(line_no, e.what());
    }
  }
  set.manifest.kept = static_cast<long>(set.records.size());

  std::ifstream mf(manifest_path(path), std::ios::binary);
  if (mf) {
    try {
      json j;
      mf >> j;
      set.manifest = manifest_from_json(j);
    } catch (const json::exception& e) {
      throw CorruptRecord(0, std::string("manifest: ") + e.what());
    }
  }
  return set;
}

}  // namespace latticeforge
