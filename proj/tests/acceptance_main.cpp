#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latticeforge/checkpoint.hpp"
#include "latticeforge/dataset.hpp"
#include "latticeforge/delaunay.hpp"
#include "latticeforge/experiments.hpp"
#include "latticeforge/inverse.hpp"
#include "latticeforge/lattice_gen.hpp"
#include "latticeforge/mechanics.hpp"
#include "latticeforge/slicing.hpp"
#include "test_support.hpp"

namespace lf = latticeforge;
namespace fs = std::filesystem;

namespace {

struct Ctx {
  std::string cli;
  std::string work;
};

struct Check {
  int total = 0;
  std::vector<std::string> bad;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok) bad.push_back(what);
  }
  bool ok() const { return bad.empty(); }
};

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

lf::MaterialSpec steel() { return {193e9, 0.3}; }

double solve_kxx(const lf::Lattice& lat, double u_star) {
  const Eigen::MatrixXd k = lf::assemble(lat, lf::ElementModel::kTruss);
  lf::Prescribed bcs;
  const int n = lat.n_nodes();
  for (int i = 0; i < n; ++i) bcs.push_back({3 * i + 2, 0.0});
  for (int i : {0, 2}) {
    bcs.push_back({3 * i, 0.0});
    bcs.push_back({3 * i + 1, 0.0});
  }
  for (int i : {1, 3}) bcs.push_back({3 * i, u_star});
  const lf::StaticSolution sol = lf::solve_condensed(k, bcs);
  return sol.work_reactions / (u_star * u_star);
}

// ---- criterion 1: pinned mechanics oracles ----

std::string run_1(const Ctx&, Check& c) {
  const double kE = 193e9;
  const double kA = 78.54e-6;
  const double kEA = kE * kA;
  const double u = 1e-3;
  double worst = 0.0;
  auto track = [&](double got, double want, const std::string& what) {
    const double r = rel_diff(got, want);
    worst = std::max(worst, r);
    c.expect(r <= 1e-9, what + " rel " + fmt(r));
  };

  {
    lf::Lattice bar;
    bar.nodes = {lf::Vec3(0, 0, 0), lf::Vec3(0, 0, 1)};
    bar.edges = {{0, 1}};
    bar.section = lftest::bar_section(kA);
    bar.material = steel();

    const Eigen::MatrixXd kt = lf::assemble(bar, lf::ElementModel::kTruss);
    lf::Prescribed bt = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, u}};
    const lf::StaticSolution st = lf::solve_condensed(kt, bt);
    track(st.f(5), kEA * u, "truss bar reaction");

    const Eigen::MatrixXd kb = lf::assemble(bar, lf::ElementModel::kBeam);
    lf::Prescribed bb;
    for (int d = 0; d < 6; ++d) bb.push_back({d, 0.0});
    for (int d : {6, 7, 9, 10, 11}) bb.push_back({d, 0.0});
    bb.push_back({8, u});
    const lf::StaticSolution sb = lf::solve_condensed(kb, bb);
    track(sb.f(8), kEA * u, "beam bar reaction");
  }

  {
    lf::Lattice chain;
    chain.nodes = {lf::Vec3(0, 0, 0), lf::Vec3(0, 0, 1), lf::Vec3(0, 0, 2)};
    chain.edges = {{0, 1}, {1, 2}};
    chain.section = lftest::bar_section(kA);
    chain.material = steel();
    const Eigen::MatrixXd k = lf::assemble(chain, lf::ElementModel::kTruss);
    lf::Prescribed bcs = {{0, 0}, {1, 0}, {2, 0}, {3, 0},
                          {4, 0}, {6, 0}, {7, 0}, {8, u}};
    const lf::StaticSolution sol = lf::solve_condensed(k, bcs);
    track(sol.u(5), u / 2.0, "series midpoint displacement");
    track(sol.f(8), kEA * u / 2.0, "series end reaction");
  }

  for (const lf::ElementModel model :
       {lf::ElementModel::kTruss, lf::ElementModel::kBeam}) {
    const lf::Lattice cube = lftest::four_bar_cube(kE, kA);
    const lf::UniaxialResult res = lf::solve_lattice(cube, model);
    const char* name =
        model == lf::ElementModel::kTruss ? "truss cube" : "beam cube";
    track(res.e_eq, 4.0 * kEA, name);
    track(res.e_eq, 60632880.0, std::string(name) + " vs 60.63 MPa");
  }

  return "worst rel " + fmt(worst) + " over " + std::to_string(c.total) +
         " checks";
}

// ---- criterion 2: transverse-effect fixture ----

std::string run_2(const Ctx&, Check& c) {
  const double kEA = 193e9 * 78.54e-6;
  const double u = 1e-3;

  const double k2 = solve_kxx(lftest::plane_square(false), u);
  const double r2 = rel_diff(k2, 2.0 * kEA);
  c.expect(r2 <= 1e-9, "lattice II vs 2EA/l rel " + fmt(r2));

  const double k1 = solve_kxx(lftest::plane_square(true), u);
  const double r1 = std::abs(k1 - 2.6 * kEA) / (2.6 * kEA);
  c.expect(r1 <= 0.02, "lattice I vs 2.6EA/l rel " + fmt(r1));

  return "K_II/(EA/l) = " + fmt(k2 / kEA) + ", K_I/(EA/l) = " + fmt(k1 / kEA);
}

// ---- criterion 3: energy identity on random lattices ----

std::string run_3(const Ctx&, Check& c) {
  double worst = 0.0;
  for (const lf::ElementModel model :
       {lf::ElementModel::kTruss, lf::ElementModel::kBeam}) {
    const char* name = model == lf::ElementModel::kTruss ? "truss" : "beam";
    int solved = 0;
    int attempt = 0;
    while (solved < 100 && attempt < 300) {
      lf::GenConfig cfg;
      cfg.n_free = 1 + attempt % 50;
      cfg.seed = 90000 + attempt;
      ++attempt;
      try {
        const lf::Lattice lat =
            lf::generate_lattice(cfg, lf::SectionSpec::circular(0.005),
                                 steel());
        const lf::UniaxialResult res = lf::solve_lattice(lat, model);
        const double r =
            rel_diff(res.sol.work_reactions, res.sol.work_quadratic);
        worst = std::max(worst, r);
        c.expect(r <= 1e-8, std::string(name) + " seed " +
                                std::to_string(cfg.seed) + " rel " + fmt(r));
        ++solved;
      } catch (const lf::SingularSystem&) {
      } catch (const lf::GenerationFailed&) {
      }
    }
    c.expect(solved == 100,
             std::string(name) + " solved only " + std::to_string(solved));
  }
  return "worst rel " + fmt(worst) + " over 200 lattices";
}

// ---- criterion 4: brute-force empty circumsphere ----

std::string run_4(const Ctx&, Check& c) {
  long tet_count = 0;
  for (int s = 0; s < 200; ++s) {
    std::vector<lf::Vec3> pts;
    if (s % 2 == 0) {
      lf::GenConfig cfg;
      cfg.n_free = 1 + (s / 2) % 22;
      cfg.seed = 5000 + s;
      pts = lf::sample_nodes(cfg);
    } else {
      std::mt19937_64 rng(7000 + s);
      const int n = 4 + s % 27;
      for (int i = 0; i < n; ++i) {
        pts.emplace_back(lf::uniform01(rng), lf::uniform01(rng),
                         lf::uniform01(rng));
      }
    }

    std::vector<lf::Tet> tets;
    try {
      tets = lf::delaunay_3d(pts);
    } catch (const lf::DegenerateInput& e) {
      c.expect(false, "set " + std::to_string(s) + " degenerate: " + e.what());
      continue;
    }
    tet_count += static_cast<long>(tets.size());

    std::vector<char> used(pts.size(), 0);
    bool set_ok = true;
    for (const lf::Tet& t : tets) {
      for (int v : t) used[v] = 1;
      const auto [center, radius] =
          lf::circumsphere(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]);
      for (int q = 0; q < static_cast<int>(pts.size()); ++q) {
        if (q == t[0] || q == t[1] || q == t[2] || q == t[3]) continue;
        if ((pts[q] - center).norm() < radius * (1.0 - 1e-9)) set_ok = false;
      }
    }
    const bool all_used =
        std::all_of(used.begin(), used.end(), [](char u) { return u == 1; });
    c.expect(set_ok, "set " + std::to_string(s) + " has a violated sphere");
    c.expect(all_used, "set " + std::to_string(s) + " dropped a point");
  }
  return std::to_string(tet_count) + " tets over 200 sets verified";
}

// ---- criterion 5: finite-difference gradient suite ----

std::string run_5(const Ctx&, Check& c) {
  using lftest::max_grad_err;
  using lftest::rand_mat;
  std::mt19937_64 rng(2025);
  double worst = 0.0;
  auto gate = [&](double err, const std::string& what) {
    worst = std::max(worst, err);
    c.expect(err <= 1e-4, what + " err " + fmt(err));
  };

  {
    Eigen::MatrixXd a = rand_mat(rng, 3, 4);
    Eigen::MatrixXd b = rand_mat(rng, 4, 2);
    const Eigen::MatrixXd tg = rand_mat(rng, 3, 2);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ia = t.parameter(a);
           s.push_back({&a, ia});
           const int ib = t.parameter(b);
           s.push_back({&b, ib});
           return t.mse_loss(t.matmul(ia, ib), t.constant(tg));
         }),
         "matmul");
  }
  {
    Eigen::MatrixXd x = rand_mat(rng, 4, 3);
    Eigen::MatrixXd bias = rand_mat(rng, 1, 3);
    const Eigen::MatrixXd tg = rand_mat(rng, 4, 3);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ix = t.parameter(x);
           s.push_back({&x, ix});
           const int ib = t.parameter(bias);
           s.push_back({&bias, ib});
           return t.mse_loss(t.add_bias(ix, ib), t.constant(tg));
         }),
         "add_bias");
  }
  {
    Eigen::MatrixXd x = rand_mat(rng, 5, 4, -2.0, 2.0);
    const Eigen::MatrixXd tg = rand_mat(rng, 5, 4);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ix = t.parameter(x);
           s.push_back({&x, ix});
           return t.mse_loss(t.selu(ix), t.constant(tg));
         }),
         "selu");
  }
  {
    Eigen::MatrixXd x = rand_mat(rng, 5, 3, -2.0, 2.0);
    Eigen::MatrixXd sl = rand_mat(rng, 1, 3, 0.1, 0.5);
    const Eigen::MatrixXd tg = rand_mat(rng, 5, 3);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ix = t.parameter(x);
           s.push_back({&x, ix});
           const int is = t.parameter(sl);
           s.push_back({&sl, is});
           return t.mse_loss(t.prelu(ix, is), t.constant(tg));
         }),
         "prelu");
  }
  {
    Eigen::MatrixXd a = rand_mat(rng, 3, 2);
    Eigen::MatrixXd b = rand_mat(rng, 3, 3);
    const Eigen::MatrixXd tg = rand_mat(rng, 4, 5);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ia = t.parameter(a);
           s.push_back({&a, ia});
           const int ib = t.parameter(b);
           s.push_back({&b, ib});
           return t.mse_loss(t.gather_rows(t.concat_cols(ia, ib), {0, 2, 1, 2}),
                             t.constant(tg));
         }),
         "concat+gather");
  }
  {
    Eigen::MatrixXd x = rand_mat(rng, 6, 3);
    const Eigen::MatrixXd tg = rand_mat(rng, 2, 3);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           const int ix = t.parameter(x);
           s.push_back({&x, ix});
           return t.mse_loss(t.segment_mean(ix, {0, 1, 0, 1, 1, 0}, 2),
                             t.constant(tg));
         }),
         "segment_mean");
  }

  for (const auto& [act, name] :
       {std::pair{lf::Activation::kLinear, "dense linear"},
        std::pair{lf::Activation::kSelu, "dense selu"},
        std::pair{lf::Activation::kPrelu, "dense prelu"}}) {
    lf::DenseLayer layer = lf::DenseLayer::make(4, 3, act, rng);
    const Eigen::MatrixXd x = rand_mat(rng, 6, 4);
    const Eigen::MatrixXd tg = rand_mat(rng, 6, 3);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& s) {
           return t.mse_loss(layer.forward(t, t.constant(x), &s),
                             t.constant(tg));
         }),
         name);
  }

  {
    lf::GnnModel m = lf::GnnModel::make(17);
    m.node_scaler.mean = Eigen::RowVectorXd::Zero(3);
    m.node_scaler.std = Eigen::RowVectorXd::Ones(3);
    m.edge_scaler.mean = Eigen::RowVectorXd::Zero(7);
    m.edge_scaler.std = Eigen::RowVectorXd::Ones(7);
    m.target_scaler.mean = Eigen::RowVectorXd::Zero(1);
    m.target_scaler.std = Eigen::RowVectorXd::Ones(1);

    lf::GraphSample s;
    s.node_feats.resize(5, 3);
    s.node_feats << 0.1, 0.2, 0.3, 0.9, 0.1, 0.4, 0.5, 0.8, 0.2, 0.3, 0.6,
        0.9, 0.7, 0.4, 0.6;
    s.edges = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4}, {3, 4}};
    s.edge_feats.resize(6, 7);
    for (int e = 0; e < 6; ++e) {
      const Eigen::RowVector3d a = s.node_feats.row(s.edges[e].first);
      const Eigen::RowVector3d b = s.node_feats.row(s.edges[e].second);
      s.edge_feats.row(e) << a, b, (b - a).norm();
    }
    const Eigen::MatrixXd tg = Eigen::MatrixXd::Constant(1, 1, 0.42);
    gate(max_grad_err([&](lf::Tape& t, std::vector<lf::ParamSlot>& slots) {
           return t.mse_loss(m.forward(t, {&s}, &slots), t.constant(tg));
         }),
         "gnn 5-node graph");
  }

  return "worst err " + fmt(worst) + " over " + std::to_string(c.total) +
         " gradient sets";
}

// ---- criterion 6: toy spring regression at desk scale ----

std::string run_6(const Ctx&, Check& c) {
  lf::ToyConfig cfg;
  const lf::DnnOutcome out = lf::run_toy(cfg);
  c.expect(out.r2_test >= 0.995, "r2_test " + fmt(out.r2_test) + " < 0.995");
  return "rows " + std::to_string(cfg.rows) + ", epochs " +
         std::to_string(cfg.epochs) + ", r2_test " + fmt(out.r2_test);
}

// ---- criterion 7: slice-feature regression at desk scale ----

std::string run_7(const Ctx&, Check& c) {
  lf::DatasetConfig dcfg;
  dcfg.n = 3000;
  dcfg.global_seed = 0;
  lf::LabeledSet data = lf::generate_labeled(dcfg);
  lf::attach_slice_features(data, 19);

  lf::SliceConfig cfg;
  const lf::SliceOutcome out = lf::run_slice(data, cfg);
  c.expect(out.out.r2_test >= 0.90,
           "r2_test " + fmt(out.out.r2_test) + " < 0.90");
  return "used " + std::to_string(out.used) + " of 3000 (excluded " +
         std::to_string(out.excluded) + "), r2_test " + fmt(out.out.r2_test);
}

// ---- criterion 8: graph surrogates at desk scale ----

std::string run_8(const Ctx& ctx, Check& c) {
  std::string detail;
  for (const lf::ElementModel model :
       {lf::ElementModel::kTruss, lf::ElementModel::kBeam}) {
    const bool truss = model == lf::ElementModel::kTruss;
    const char* name = truss ? "truss" : "beam";
    const double gate = truss ? 0.95 : 0.93;
    const double t0 = now_s();

    lf::DatasetConfig pool_cfg;
    pool_cfg.n = 4600;
    pool_cfg.model = model;
    pool_cfg.global_seed = 0;
    const lf::LabeledSet pool = lf::generate_labeled(pool_cfg);

    lf::DatasetConfig hidden_cfg = pool_cfg;
    hidden_cfg.n = 400;
    hidden_cfg.stream = lf::seed_stream::kHiddenTest;
    const lf::LabeledSet hidden = lf::generate_labeled(hidden_cfg);

    lf::GnnRunConfig cfg;
    cfg.n_val = 600;
    cfg.seed = 0;
    lf::GnnOutcome out = lf::run_gnn(pool, hidden, cfg);
    const double dt = now_s() - t0;

    c.expect(out.r2_test >= gate, std::string(name) + " r2_test " +
                                      fmt(out.r2_test) + " < " + fmt(gate));
    c.expect(dt <= 2700.0,
             std::string(name) + " took " + fmt(dt) + " s (> 2700)");

    if (truss) {
      lf::CheckpointMeta meta;
      meta.kind = "gnn-truss";
      meta.seed = cfg.seed;
      meta.epochs = cfg.epochs;
      meta.lr = cfg.lr;
      meta.batch_size = cfg.batch_size;
      meta.best_val = out.fit.best_val;
      meta.best_epoch = out.fit.best_epoch;
      meta.n_val = cfg.n_val;
      lf::save_gnn(ctx.work + "/gnn-truss.ckpt.json", out.model, meta);
    }
    if (!detail.empty()) detail += "; ";
    detail += std::string(name) + " r2_test " + fmt(out.r2_test) + " in " +
              fmt(dt) + " s";
    std::cout << "  " << name << ": r2_test " << out.r2_test << ", "
              << fmt(dt) << " s" << std::endl;
  }
  return detail;
}

// ---- criterion 9: permutation invariance and parameter budget ----

std::string run_9(const Ctx&, Check& c) {
  lf::GnnModel m = lf::GnnModel::make(0);
  m.node_scaler.mean = Eigen::RowVectorXd::Zero(3);
  m.node_scaler.std = Eigen::RowVectorXd::Ones(3);
  m.edge_scaler.mean = Eigen::RowVectorXd::Zero(7);
  m.edge_scaler.std = Eigen::RowVectorXd::Ones(7);
  m.target_scaler.mean = Eigen::RowVectorXd::Zero(1);
  m.target_scaler.std = Eigen::RowVectorXd::Ones(1);

  lf::GenConfig gc;
  gc.n_free = 12;
  gc.seed = 5;
  const lf::Lattice base =
      lf::generate_lattice(gc, lf::SectionSpec::circular(0.005), steel());
  const double ref = m.predict(lf::build_graph_sample(base));
  c.expect(std::isfinite(ref), "reference prediction not finite");

  std::mt19937_64 rng(77);
  const int n = base.n_nodes();
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i],
                perm[static_cast<int>(lf::uniform_int_in(rng, 0, i))]);
    }
    lf::Lattice relabeled = base;
    for (int i = 0; i < n; ++i) relabeled.nodes[perm[i]] = base.nodes[i];
    relabeled.edges.clear();
    for (const lf::Edge& e : base.edges) {
      const int a = perm[e.first];
      const int b = perm[e.second];
      relabeled.edges.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(relabeled.edges.begin(), relabeled.edges.end());
    const double got = m.predict(lf::build_graph_sample(relabeled));
    const double rel = std::abs(got - ref) / std::max(1.0, std::abs(ref));
    worst = std::max(worst, rel);
  }
  c.expect(worst <= 1e-10, "relabeling drift " + fmt(worst) + " > 1e-10");

  const int expected = (3 * 5 + 5 + 5) + (7 * 5 + 5 + 5) + (15 * 10 + 10) +
                       (15 * 10 + 10) + (25 * 10 + 10) + (20 * 10 + 10) +
                       (10 * 1 + 1);
  c.expect(m.n_params() == expected,
           "param count " + std::to_string(m.n_params()) + " != closed form " +
               std::to_string(expected));
  c.expect(m.n_params() < 1100,
           "param count " + std::to_string(m.n_params()) + " >= 1100");
  const lf::Mlp slice = lf::Mlp::make(
      {57, 57, 285, 1},
      {lf::Activation::kSelu, lf::Activation::kSelu, lf::Activation::kLinear},
      1);
  c.expect(m.n_params() * 10 < slice.n_params(),
           "param count not below a tenth of the slice net");

  return "drift " + fmt(worst) + " over 50 relabelings, " +
         std::to_string(m.n_params()) + " params";
}

// ---- criterion 10: inverse design loop at desk scale ----

std::string run_10(const Ctx& ctx, Check& c) {
  const std::string ckpt = ctx.work + "/gnn-truss.ckpt.json";
  if (!fs::exists(ckpt)) {
    c.expect(false, "missing " + ckpt + " (criterion 8 produces it)");
    return "no trained truss model";
  }
  lf::GnnCheckpoint ck = lf::load_gnn(ckpt);

  lf::DatasetConfig cfg;
  cfg.n = 10000;
  cfg.global_seed = 0;
  cfg.stream = lf::seed_stream::kInverseDb;
  const lf::InverseDb db = lf::build_design_db(cfg, ck.model);
  c.expect(static_cast<int>(db.points.size()) == 10000,
           "database holds " + std::to_string(db.points.size()));

  const std::vector<int> front = lf::pareto_front(db.points);
  c.expect(!front.empty(), "empty pareto front");
  std::vector<char> on_front(db.points.size(), 0);
  for (int i : front) on_front[i] = 1;

  bool front_clean = true;
  for (int i : front) {
    for (const lf::DesignPoint& p : db.points) {
      if (lf::dominates(p, db.points[i])) front_clean = false;
    }
  }
  c.expect(front_clean, "a front point is dominated");

  bool others_covered = true;
  for (std::size_t i = 0; i < db.points.size(); ++i) {
    if (on_front[i]) continue;
    bool dominated = false;
    for (int j : front) {
      if (lf::dominates(db.points[j], db.points[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) others_covered = false;
  }
  c.expect(others_covered, "an off-front point is non-dominated");

  for (std::size_t k = 1; k < front.size(); ++k) {
    if (db.points[front[k - 1]].e_pred > db.points[front[k]].e_pred) {
      c.expect(false, "front not sorted by predicted modulus");
      break;
    }
  }

  std::vector<double> preds;
  preds.reserve(db.points.size());
  for (const lf::DesignPoint& p : db.points) preds.push_back(p.e_pred);
  std::nth_element(preds.begin(), preds.begin() + preds.size() / 2,
                   preds.end());
  const double median = preds[preds.size() / 2];

  double width = 1e6;
  long in_band = 0;
  for (int grow = 0; grow < 40; ++grow) {
    in_band = 0;
    for (const lf::DesignPoint& p : db.points) {
      if (p.e_pred >= median - width && p.e_pred <= median + width) ++in_band;
    }
    if (in_band >= 10) break;
    width *= 2.0;
  }
  c.expect(in_band >= 10, "band never reached 10 candidates");

  const double lo = median - width;
  const double hi = median + width;
  const lf::QueryResult q = lf::local_query(db.points, lo, hi);
  c.expect(static_cast<long>(q.in_band.size()) == in_band,
           "query in-band count " + std::to_string(q.in_band.size()) +
               " != " + std::to_string(in_band));
  const lf::DesignPoint& best = db.points[q.best];
  c.expect(best.e_pred >= lo && best.e_pred <= hi, "best lies outside band");
  double min_vol = std::numeric_limits<double>::infinity();
  for (const lf::DesignPoint& p : db.points) {
    if (p.e_pred >= lo && p.e_pred <= hi) min_vol = std::min(min_vol, p.volume);
  }
  c.expect(best.volume == min_vol,
           "best volume " + fmt(best.volume) + " != band minimum " +
               fmt(min_vol));

  const double rel = lf::validate_candidate(best, cfg);
  c.expect(rel <= 0.05, "validation error " + fmt(rel) + " > 5%");

  return "front " + std::to_string(front.size()) + ", band " +
         std::to_string(in_band) + " wide " + fmt(width / 1e6) +
         " MPa, validation " + fmt(100.0 * rel) + "%";
}

// ---- criterion 11: byte-identical artifacts across reruns ----

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run_11(const Ctx& ctx, Check& c) {
  if (ctx.cli.empty() || !fs::exists(ctx.cli)) {
    c.expect(false, "--cli path missing (" + ctx.cli + ")");
    return "no cli binary";
  }
  const std::string r1 = ctx.work + "/r1";
  const std::string r2 = ctx.work + "/r2";
  const std::string r3 = ctx.work + "/r3";
  for (const std::string& d : {r1, r2, r3}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }
  int cmd_no = 0;
  auto run = [&](const std::string& args) {
    const std::string log =
        ctx.work + "/cmd" + std::to_string(cmd_no++) + ".log";
    const std::string cmd = ctx.cli + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    c.expect(rc == 0, "exit " + std::to_string(rc) + ": " + args);
    return rc == 0;
  };
  auto same_bytes = [&](const std::string& a, const std::string& b,
                        const std::string& what) {
    const std::string ba = slurp(a);
    const std::string bb = slurp(b);
    c.expect(!ba.empty() && ba == bb, what + " differ (" + a + ")");
  };

  const std::string gen =
      " generate --n 40 --model truss --slices 9 --n-free-max 12 --out ";
  run("--seed 11 --workers 1" + gen + r1 + "/data.jsonl.gz");
  run("--seed 11 --workers 1" + gen + r2 + "/data.jsonl.gz");
  run("--seed 11 --workers 3" + gen + r3 + "/data.jsonl.gz");
  same_bytes(r1 + "/data.jsonl.gz", r2 + "/data.jsonl.gz", "dataset bytes");
  same_bytes(r1 + "/data.manifest.json", r2 + "/data.manifest.json",
             "manifests");
  same_bytes(r1 + "/data.jsonl.gz", r3 + "/data.jsonl.gz",
             "worker-count dataset bytes");
  same_bytes(r1 + "/data.manifest.json", r3 + "/data.manifest.json",
             "worker-count manifests");

  const std::string toy =
      " train dnn-toy --rows 200 --epochs 40 --out ";
  run("--seed 5" + toy + r1 + "/toy.ckpt.json");
  run("--seed 5" + toy + r2 + "/toy.ckpt.json");
  same_bytes(r1 + "/toy.ckpt.json", r2 + "/toy.ckpt.json", "toy checkpoints");
  same_bytes(r1 + "/toy.ckpt.history.csv", r2 + "/toy.ckpt.history.csv",
             "toy histories");

  const std::string pool =
      " generate --n 30 --model truss --n-free-max 8 --out ";
  run("--seed 7 --workers 1" + pool + r1 + "/pool.jsonl");
  run("--seed 7 --workers 1" + pool + r2 + "/pool.jsonl");
  const std::string gtrain =
      " train gnn --epochs 5 --val-n 6 --hidden-n 6 --batch 8 --data ";
  run("--seed 7 --workers 1" + gtrain + r1 + "/pool.jsonl --out " + r1 +
      "/g.ckpt.json");
  run("--seed 7 --workers 1" + gtrain + r2 + "/pool.jsonl --out " + r2 +
      "/g.ckpt.json");
  same_bytes(r1 + "/g.ckpt.json", r2 + "/g.ckpt.json", "gnn checkpoints");
  same_bytes(r1 + "/g.ckpt.history.csv", r2 + "/g.ckpt.history.csv", "gnn histories");

  const std::string inv =
      " inverse --n 50 --n-free-max 8 --band-mpa 100000 --model-ckpt " + r1 +
      "/g.ckpt.json --out ";
  run("--seed 7 --workers 1" + inv + r1 + "/inv.csv");
  run("--seed 7 --workers 1" + inv + r2 + "/inv.csv");
  same_bytes(r1 + "/inv.csv", r2 + "/inv.csv", "design CSVs");

  return std::to_string(cmd_no) + " commands, all artifact pairs identical";
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  Ctx ctx;
  ctx.work = "acceptance-work";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << arg << " needs a value\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--criterion") {
      criterion = std::atoi(next().c_str());
    } else if (arg == "--cli") {
      ctx.cli = next();
    } else if (arg == "--work") {
      ctx.work = next();
    } else {
      std::cerr << "unknown argument " << arg << "\n";
      return 2;
    }
  }
  if (criterion < 1 || criterion > 11) {
    std::cerr << "usage: acceptance --criterion N [--cli PATH] [--work DIR]\n";
    return 2;
  }
  fs::create_directories(ctx.work);

  // seconds; 0 = no budget pinned
  const double budgets[12] = {0,  1,   1,   30, 30, 60, 600,
                              1200, 5400, 0,  600, 0};

  Check check;
  std::string detail;
  const double t0 = now_s();
  try {
    switch (criterion) {
      case 1: detail = run_1(ctx, check); break;
      case 2: detail = run_2(ctx, check); break;
      case 3: detail = run_3(ctx, check); break;
      case 4: detail = run_4(ctx, check); break;
      case 5: detail = run_5(ctx, check); break;
      case 6: detail = run_6(ctx, check); break;
      case 7: detail = run_7(ctx, check); break;
      case 8: detail = run_8(ctx, check); break;
      case 9: detail = run_9(ctx, check); break;
      case 10: detail = run_10(ctx, check); break;
      case 11: detail = run_11(ctx, check); break;
    }
  } catch (const std::exception& e) {
    check.expect(false, std::string("unhandled exception: ") + e.what());
  }
  const double dt = now_s() - t0;
  if (budgets[criterion] > 0 && dt > budgets[criterion]) {
    check.expect(false, "runtime " + fmt(dt) + " s exceeds budget " +
                            fmt(budgets[criterion]) + " s");
  }

  if (check.ok()) {
    std::cout << "criterion " << criterion << ": PASS (" << detail << "; "
              << fmt(dt) << " s)\n";
    return 0;
  }
  std::cout << "criterion " << criterion << ": FAIL (";
  for (std::size_t i = 0; i < check.bad.size() && i < 4; ++i) {
    if (i) std::cout << "; ";
    std::cout << check.bad[i];
  }
  if (check.bad.size() > 4) {
    std::cout << "; +" << check.bad.size() - 4 << " more";
  }
  std::cout << "; " << fmt(dt) << " s)\n";
  return 1;
}
