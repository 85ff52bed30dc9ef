#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "latticeforge/nn.hpp"
#include "test_support.hpp"

using namespace latticeforge;
using lftest::rand_mat;

TEST_CASE("dense layer init: fan-in bound, zero bias, quarter slopes") {
  std::mt19937_64 rng(11);
  const DenseLayer lin = DenseLayer::make(12, 7, Activation::kLinear, rng);
  CHECK(lin.w.rows() == 12);
  CHECK(lin.w.cols() == 7);
  const double bound = std::sqrt(3.0 / 12.0);
  CHECK(lin.w.cwiseAbs().maxCoeff() <= bound);
  CHECK(lin.w.cwiseAbs().maxCoeff() > 0.0);
  CHECK(lin.b.isZero(0.0));
  CHECK(lin.slopes.size() == 0);
  CHECK(lin.n_params() == 12 * 7 + 7);

  const DenseLayer pre = DenseLayer::make(4, 5, Activation::kPrelu, rng);
  CHECK(pre.slopes.rows() == 1);
  CHECK(pre.slopes.cols() == 5);
  CHECK((pre.slopes.array() == 0.25).all());
  CHECK(pre.n_params() == 4 * 5 + 5 + 5);
}

TEST_CASE("dense layer forward agrees with and without slots") {
  std::mt19937_64 rng(12);
  DenseLayer layer = DenseLayer::make(6, 3, Activation::kPrelu, rng);
  const Eigen::MatrixXd x = rand_mat(rng, 5, 6);

  Tape t1;
  std::vector<ParamSlot> slots;
  const Eigen::MatrixXd y1 =
      t1.value(layer.forward(t1, t1.constant(x), &slots));
  CHECK(slots.size() == 3);

  Tape t2;
  const Eigen::MatrixXd y2 =
      t2.value(layer.forward(t2, t2.constant(x), nullptr));
  CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mlp parameter counts for the two dense architectures") {
  const std::vector<Activation> acts = {Activation::kSelu, Activation::kSelu,
                                        Activation::kLinear};
  const Mlp toy = Mlp::make({19, 19, 95, 1}, acts, 1);
  CHECK(toy.n_params() == 2376);
  const Mlp slice = Mlp::make({57, 57, 285, 1}, acts, 2);
  CHECK(slice.n_params() == 20122);
  CHECK_THROWS_AS(Mlp::make({3, 4}, acts, 3), DimensionMismatch);
}

TEST_CASE("standard scaler matches hand statistics and round-trips") {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd x = rand_mat(rng, 40, 3, -5.0, 5.0);
  StandardScaler sc;
  sc.fit(x);
  for (int j = 0; j < 3; ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().mean();
    CHECK(sc.mean(j) == doctest::Approx(mean).epsilon(1e-14));
    CHECK(sc.std(j) == doctest::Approx(std::sqrt(var)).epsilon(1e-14));
  }
  const Eigen::MatrixXd z = sc.transform(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
  const Eigen::MatrixXd back = sc.inverse(z);
  CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 2, 3.0);
  StandardScaler sc2;
  sc2.fit(flat);
  CHECK(sc2.std(0) == 1e-12);
  CHECK(sc2.transform(flat).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sc2.fit(Eigen::MatrixXd(0, 2)), EmptyRange);
  CHECK_THROWS_AS(sc2.transform(Eigen::MatrixXd::Zero(2, 3)),
                  DimensionMismatch);
}

TEST_CASE("mse and r2 hand values") {
  Eigen::VectorXd pred(3), target(3);
  pred << 1, 2, 3;
  target << 1, 3, 2;
  CHECK(mse(pred, target) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r2_score(pred, target) == doctest::Approx(0.0).epsilon(1e-15));

  pred << 2, 4, 6;
  target << 1, 5, 6;
  CHECK(r2_score(pred, target) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 1.5);
  CHECK_THROWS_AS(r2_score(flat, flat), DegenerateTarget);
  Eigen::VectorXd one(1);
  one << 2.0;
  CHECK_THROWS_AS(r2_score(one, one), EmptyRange);
  Eigen::VectorXd empty(0);
  CHECK_THROWS_AS(mse(empty, empty), EmptyRange);
}

namespace {

double nadam_scalar_reference(double w0, double lr, int steps) {
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double w = w0, m = 0.0, v = 0.0;
  for (int t = 1; t <= steps; ++t) {
    const double g = 2.0 * w;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    const double mhat = m / (1.0 - std::pow(beta1, t + 1));
    const double ghat = g / (1.0 - std::pow(beta1, t));
    const double vhat = v / (1.0 - std::pow(beta2, t));
    w -= lr * (beta1 * mhat + (1.0 - beta1) * ghat) / (std::sqrt(vhat) + eps);
  }
  return w;
}

}  // namespace

TEST_CASE("nadam matches a scalar transcription on f(w) = w^2") {
  Eigen::MatrixXd w(1, 1);
  w << 0.7;
  Nadam opt;
  for (int s = 0; s < 3; ++s) {
    Tape t;
    std::vector<ParamSlot> slots;
    const int iw = t.parameter(w);
    slots.push_back({&w, iw});
    t.backward(t.matmul(iw, iw));
    opt.step(t, slots, 0.01);
  }
  CHECK(opt.steps_taken() == 3);
  const double ref = nadam_scalar_reference(0.7, 0.01, 3);
  CHECK(w(0, 0) == doctest::Approx(ref).epsilon(1e-15));
}

TEST_CASE("nadam leaves parameters with zero gradient unchanged") {
  Eigen::MatrixXd w(1, 2);
  w << 1.25, -0.5;
  Nadam opt;
  Tape t;
  std::vector<ParamSlot> slots;
  const int iw = t.parameter(w);
  slots.push_back({&w, iw});
  const int loss = t.mse_loss(t.constant(Eigen::MatrixXd::Zero(2, 1)),
                              t.constant(Eigen::MatrixXd::Zero(2, 1)));
  t.backward(loss);
  opt.step(t, slots, 0.5);
  CHECK(w(0, 0) == 1.25);
  CHECK(w(0, 1) == -0.5);
}

namespace {

// y = 2x regression with one weight; exercises the full fit loop.
struct LinModel final : TrainableModel {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd x_train, y_train, x_val, y_val;

  static LinModel make() {
    LinModel m;
    const int n = 32;
    m.x_train.resize(n, 1);
    m.y_train.resize(n, 1);
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) / (n - 1);
      m.x_train(i, 0) = x;
      m.y_train(i, 0) = 2.0 * x;
    }
    m.x_val = m.x_train;
    m.y_val = m.y_train;
    return m;
  }

  int n_train() const override { return static_cast<int>(x_train.rows()); }

  int build_loss(Tape& t, const std::vector<int>& rows,
                 std::vector<ParamSlot>& slots) override {
    Eigen::MatrixXd xb(rows.size(), 1), yb(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      xb(i, 0) = x_train(rows[i], 0);
      yb(i, 0) = y_train(rows[i], 0);
    }
    const int iw = t.parameter(w);
    slots.push_back({&w, iw});
    return t.mse_loss(t.matmul(t.constant(xb), iw), t.constant(yb));
  }

  double val_loss() override {
    return mse((x_val * w).col(0), y_val.col(0));
  }

  std::vector<Eigen::MatrixXd*> parameters() override { return {&w}; }
};

// Validation loss never improves after the first epoch; drives the plateau
// and early-stop machinery deterministically.
struct StuckModel final : TrainableModel {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, 0.3);

  int n_train() const override { return 4; }
  int build_loss(Tape& t, const std::vector<int>&,
                 std::vector<ParamSlot>& slots) override {
    const int iw = t.parameter(w);
    slots.push_back({&w, iw});
    return t.matmul(iw, iw);
  }
  double val_loss() override { return 1.0; }
  std::vector<Eigen::MatrixXd*> parameters() override { return {&w}; }
};

struct ExplodingModel final : TrainableModel {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, 1e200);

  int n_train() const override { return 2; }
  int build_loss(Tape& t, const std::vector<int>&,
                 std::vector<ParamSlot>& slots) override {
    const int iw = t.parameter(w);
    slots.push_back({&w, iw});
    return t.matmul(iw, iw);
  }
  double val_loss() override { return 0.5; }
  std::vector<Eigen::MatrixXd*> parameters() override { return {&w}; }
};

}  // namespace

TEST_CASE("fit converges on y = 2x") {
  LinModel m = LinModel::make();
  FitConfig cfg;
  cfg.epochs = 400;
  cfg.lr = 0.05;
  cfg.batch_size = 0;
  cfg.min_improve = 0.0;  // keep tiny gains counting, no plateau throttling
  cfg.seed = 7;
  const FitResult res = fit(m, cfg);
  CHECK(m.w(0, 0) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(res.best_val < 1e-6);
  CHECK(res.best_epoch >= 0);
  CHECK(res.history.front().epoch == 0);
}

TEST_CASE("fit restores the best parameters seen") {
  LinModel m = LinModel::make();
  FitConfig cfg;
  cfg.epochs = 400;
  cfg.lr = 0.05;
  cfg.seed = 7;
  const FitResult res = fit(m, cfg);
  const double replayed = m.val_loss();
  CHECK(replayed == doctest::Approx(res.best_val).epsilon(1e-15));
}

TEST_CASE("plateau halving and early stop on a stuck validation loss") {
  StuckModel m;
  FitConfig cfg;
  cfg.epochs = 5000;
  cfg.lr = 0.1;
  cfg.seed = 3;
  const FitResult res = fit(m, cfg);
  CHECK(res.best_epoch == 0);
  CHECK(res.best_val == 1.0);
  const std::size_t n = res.history.size();
  CHECK(n >= 200);
  CHECK(n <= 205);
  CHECK(res.history.back().lr < 0.2 * cfg.lr);
}

TEST_CASE("fit is deterministic for a fixed seed") {
  auto run = [] {
    LinModel m = LinModel::make();
    FitConfig cfg;
    cfg.epochs = 60;
    cfg.lr = 0.02;
    cfg.batch_size = 8;
    cfg.seed = 42;
    const FitResult res = fit(m, cfg);
    return std::make_pair(res, m.w(0, 0));
  };
  const auto [r1, w1] = run();
  const auto [r2, w2] = run();
  CHECK(w1 == w2);
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
    CHECK(r1.history[i].val_loss == r2.history[i].val_loss);
    CHECK(r1.history[i].lr == r2.history[i].lr);
  }
}

TEST_CASE("fit rejects non-finite losses and bad configs") {
  ExplodingModel m;
  FitConfig cfg;
  cfg.epochs = 5;
  CHECK_THROWS_AS(fit(m, cfg), NonFiniteLoss);

  LinModel ok = LinModel::make();
  FitConfig bad;
  bad.lr = 0.0;
  CHECK_THROWS_AS(fit(ok, bad), DimensionMismatch);

  LinModel hollow = LinModel::make();
  hollow.x_train.resize(0, 1);
  hollow.y_train.resize(0, 1);
  CHECK_THROWS_AS(fit(hollow, FitConfig{}), EmptyRange);
}
