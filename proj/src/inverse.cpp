#include "latticeforge/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>

namespace latticeforge {

namespace {

struct Candidate {
  bool ok = false;
  std::uint64_t seed = 0;
  int n_free = 0;
  double volume = 0.0;
  GraphSample graph;
};

Candidate try_candidate(const DatasetConfig& cfg, std::uint64_t sample_seed) {
  Candidate c;
  c.seed = sample_seed;
  try {
    const Lattice lat = lattice_from_sample_seed(cfg, sample_seed, &c.n_free);
    c.volume = lattice_volume(lat);
    c.graph = build_graph_sample(lat);
    c.ok = true;
  } catch (const GenerationFailed&) {
  }
  return c;
}

}  // namespace

InverseDb build_design_db(const DatasetConfig& cfg, GnnModel& model) {
  if (cfg.n < 1) throw EmptyRange("database size must be positive");
  InverseDb db;
  std::uint64_t next_index = 0;
  long kept = 0;
  while (kept < cfg.n) {
    const long missing = cfg.n - kept;
    std::vector<Candidate> wave(static_cast<std::size_t>(missing + missing / 8 + 4));
    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || wave.size() < 2) {
      for (std::size_t k = 0; k < wave.size(); ++k) {
        wave[k] = try_candidate(
            cfg, derive_seed(cfg.global_seed, cfg.stream, next_index + k));
      }
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (wave.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(wave.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          for (std::size_t k = lo; k < hi; ++k) {
            wave[k] = try_candidate(
                cfg, derive_seed(cfg.global_seed, cfg.stream, next_index + k));
          }
        });
      }
      for (std::thread& t : pool) t.join();
    }
    for (Candidate& c : wave) {
      ++db.requested;
      if (!c.ok) {
        ++db.discarded;
        continue;
      }
      DesignPoint p;
      p.id = kept;
      p.seed = c.seed;
      p.n_free = c.n_free;
      p.volume = c.volume;
      p.inv_volume = 1.0 / c.volume;
      p.e_pred = model.predict(c.graph);
      db.points.push_back(p);
      if (++kept == cfg.n) break;
    }
    next_index += wave.size();
  }
  return db;
}

bool dominates(const DesignPoint& a, const DesignPoint& b) {
  const bool ge = a.e_pred >= b.e_pred && a.inv_volume >= b.inv_volume;
  const bool gt = a.e_pred > b.e_pred || a.inv_volume > b.inv_volume;
  return ge && gt;
}

std::vector<int> pareto_front(const std::vector<DesignPoint>& db) {
  const int n = static_cast<int>(db.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (db[a].inv_volume != db[b].inv_volume) {
      return db[a].inv_volume > db[b].inv_volume;
    }
    return db[a].id < db[b].id;
  });

  std::vector<int> front;
  double best_e = -std::numeric_limits<double>::infinity();
  int i = 0;
  while (i < n) {
    int j = i;
    double group_e = -std::numeric_limits<double>::infinity();
    while (j < n && db[order[j]].inv_volume == db[order[i]].inv_volume) {
      group_e = std::max(group_e, db[order[j]].e_pred);
      ++j;
    }
    if (group_e > best_e) {
      for (int k = i; k < j; ++k) {
        if (db[order[k]].e_pred == group_e) front.push_back(order[k]);
      }
      best_e = group_e;
    }
    i = j;
  }
  std::sort(front.begin(), front.end(), [&](int a, int b) {
    if (db[a].e_pred != db[b].e_pred) return db[a].e_pred < db[b].e_pred;
    return db[a].id < db[b].id;
  });
  return front;
}

QueryResult local_query(const std::vector<DesignPoint>& db, double e_min,
                        double e_max) {
  QueryResult q;
  for (int i = 0; i < static_cast<int>(db.size()); ++i) {
    if (db[i].e_pred >= e_min && db[i].e_pred <= e_max) q.in_band.push_back(i);
  }
  if (q.in_band.empty()) {
    throw EmptyRange("no design has a predicted modulus inside the band");
  }
  q.best = q.in_band.front();
  for (int i : q.in_band) {
    const DesignPoint& c = db[i];
    const DesignPoint& b = db[q.best];
    if (c.inv_volume > b.inv_volume ||
        (c.inv_volume == b.inv_volume &&
         (c.e_pred > b.e_pred ||
          (c.e_pred == b.e_pred && c.id < b.id)))) {
      q.best = i;
    }
  }
  return q;
}

Lattice regenerate_candidate(const DesignPoint& p, const DatasetConfig& cfg) {
  int n_free = 0;
  Lattice lat = lattice_from_sample_seed(cfg, p.seed, &n_free);
  if (n_free != p.n_free) {
    throw SchemaMismatch("regenerated joint count disagrees with the record");
  }
  const double vol = lattice_volume(lat);
  if (std::abs(vol - p.volume) > 1e-9 * p.volume) {
    throw SchemaMismatch("regenerated volume disagrees with the record");
  }
  return lat;
}

double validate_candidate(const DesignPoint& p, const DatasetConfig& cfg) {
  const Lattice lat = regenerate_candidate(p, cfg);
  const UniaxialResult res = solve_lattice(lat, cfg.model);
  return std::abs(res.e_eq - p.e_pred) / res.e_eq;
}

void write_design_csv(const std::string& path,
                      const std::vector<DesignPoint>& db,
                      const std::vector<int>& front) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptRecord(0, "cannot open " + path + " for writing");
  std::vector<char> on_front(db.size(), 0);
  for (int i : front) on_front[i] = 1;
  out << "id,seed,n_free,volume_m3,inv_volume,e_pred_mpa,on_front\n";
  for (std::size_t i = 0; i < db.size(); ++i) {
    const DesignPoint& p = db[i];
    out << p.id << ',' << p.seed << ',' << p.n_free << ','
        << num17(p.volume) << ',' << num17(p.inv_volume) << ','
        << num17(p.e_pred / 1e6) << ',' << int(on_front[i]) << '\n';
  }
}

}  // namespace latticeforge
