#include "latticeforge/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latticeforge {

DenseLayer DenseLayer::make(int in, int out, Activation act,
                            std::mt19937_64& rng) {
  if (in <= 0 || out <= 0) throw DimensionMismatch("bad layer sizes");
  DenseLayer l;
  l.act = act;
  l.w.resize(in, out);
  const double bound = std::sqrt(3.0 / in);
  for (int i = 0; i < in; ++i) {
    for (int j = 0; j < out; ++j) {
      l.w(i, j) = uniform_in(rng, -bound, bound);
    }
  }
  l.b = Eigen::MatrixXd::Zero(1, out);
  if (act == Activation::kPrelu) {
    l.slopes = Eigen::MatrixXd::Constant(1, out, 0.25);
  }
  return l;
}

int DenseLayer::forward(Tape& t, int x, std::vector<ParamSlot>* slots) {
  auto push = [&](Eigen::MatrixXd& m) {
    if (slots) {
      const int id = t.parameter(m);
      slots->push_back({&m, id});
      return id;
    }
    return t.constant(m);
  };
  const int wi = push(w);
  const int bi = push(b);
  const int lin = t.add_bias(t.matmul(x, wi), bi);
  switch (act) {
    case Activation::kLinear:
      return lin;
    case Activation::kSelu:
      return t.selu(lin);
    case Activation::kPrelu:
      return t.prelu(lin, push(slopes));
  }
  throw DimensionMismatch("unknown activation");
}

int DenseLayer::n_params() const {
  return static_cast<int>(w.size() + b.size() + slopes.size());
}

void DenseLayer::collect(std::vector<Eigen::MatrixXd*>& out) {
  out.push_back(&w);
  out.push_back(&b);
  if (slopes.size() > 0) out.push_back(&slopes);
}

Mlp Mlp::make(const std::vector<int>& dims,
              const std::vector<Activation>& acts, std::uint64_t seed) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1) {
    throw DimensionMismatch("layer sizes and activations disagree");
  }
  Mlp net;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    net.layers.push_back(
        DenseLayer::make(dims[i], dims[i + 1], acts[i], rng));
  }
  return net;
}

int Mlp::forward(Tape& t, int x, std::vector<ParamSlot>* slots) {
  int h = x;
  for (DenseLayer& l : layers) h = l.forward(t, h, slots);
  return h;
}

int Mlp::n_params() const {
  int n = 0;
  for (const DenseLayer& l : layers) n += l.n_params();
  return n;
}

std::vector<Eigen::MatrixXd*> Mlp::parameters() {
  std::vector<Eigen::MatrixXd*> out;
  for (DenseLayer& l : layers) l.collect(out);
  return out;
}

void StandardScaler::fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw EmptyRange("scaler fit on empty data");
  mean = x.colwise().mean();
  const Eigen::RowVectorXd var =
      (x.rowwise() - mean).array().square().colwise().mean().matrix();
  std = var.array().sqrt().max(1e-12).matrix();
}

Eigen::MatrixXd StandardScaler::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.cols()) throw DimensionMismatch("scaler width");
  return ((x.rowwise() - mean).array().rowwise() / std.array()).matrix();
}

Eigen::MatrixXd StandardScaler::inverse(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.cols()) throw DimensionMismatch("scaler width");
  return ((x.array().rowwise() * std.array()).rowwise() + mean.array())
      .matrix();
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) {
    throw DimensionMismatch("mse operands differ in length");
  }
  if (pred.size() == 0) throw EmptyRange("mse over empty vectors");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double r2_score(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) {
    throw DimensionMismatch("r2 operands differ in length");
  }
  if (pred.size() < 2) throw EmptyRange("r2 needs at least two samples");
  const double mean = target.mean();
  const double ss_tot = (target.array() - mean).square().sum();
  if (ss_tot / static_cast<double>(target.size()) < 1e-15) {
    throw DegenerateTarget("target variance below 1e-15");
  }
  const double ss_res = (target - pred).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

void Nadam::step(const Tape& tape, const std::vector<ParamSlot>& slots,
                 double lr) {
  if (m_.empty()) {
    m_.resize(slots.size());
    v_.resize(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      m_[i] = Eigen::MatrixXd::Zero(slots[i].param->rows(),
                                    slots[i].param->cols());
      v_[i] = m_[i];
    }
  }
  if (m_.size() != slots.size()) {
    throw DimensionMismatch("optimizer bound to a different parameter set");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc1_next = 1.0 - std::pow(beta1_, static_cast<double>(t_ + 1));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Eigen::MatrixXd& g = tape.grad(slots[i].node);
    if (g.rows() != m_[i].rows() || g.cols() != m_[i].cols()) {
      throw DimensionMismatch("gradient shape drifted between steps");
    }
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] =
        (beta2_ * v_[i].array() + (1.0 - beta2_) * g.array().square()).matrix();
    const Eigen::ArrayXXd m_hat = m_[i].array() / bc1_next;
    const Eigen::ArrayXXd g_hat = g.array() / bc1;
    const Eigen::ArrayXXd v_hat = v_[i].array() / bc2;
    slots[i].param->array() -=
        lr * (beta1_ * m_hat + (1.0 - beta1_) * g_hat) /
        (v_hat.sqrt() + eps_);
  }
}

FitResult fit(TrainableModel& model, const FitConfig& cfg) {
  const int n = model.n_train();
  if (n < 1) throw EmptyRange("nothing to train on");
  if (!(cfg.lr > 0.0)) throw DimensionMismatch("learning rate must be > 0");

  Nadam opt;
  double lr = cfg.lr;
  FitResult res;
  std::vector<Eigen::MatrixXd> best;
  const std::vector<Eigen::MatrixXd*> params = model.parameters();
  auto snapshot = [&] {
    best.clear();
    for (const Eigen::MatrixXd* p : params) best.push_back(*p);
  };
  snapshot();
  double best_val = std::numeric_limits<double>::infinity();
  int plateau_bad = 0;
  int early_bad = 0;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const int bs = cfg.batch_size <= 0 ? n : std::min(cfg.batch_size, n);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 rng(derive_seed(cfg.seed, seed_stream::kShuffle,
                                    static_cast<std::uint64_t>(epoch)));
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[uniform_int_in(rng, 0, i)]);
    }

    double train_acc = 0.0;
    int counted = 0;
    for (int start = 0; start < n; start += bs) {
      const int len = std::min(bs, n - start);
      const std::vector<int> rows(order.begin() + start,
                                  order.begin() + start + len);
      Tape tape;
      std::vector<ParamSlot> slots;
      const int loss_id = model.build_loss(tape, rows, slots);
      const double loss = tape.scalar(loss_id);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("training loss diverged at epoch " +
                            std::to_string(epoch));
      }
      tape.backward(loss_id);
      opt.step(tape, slots, lr);
      train_acc += loss * len;
      counted += len;
    }
    const double train_loss = train_acc / counted;
    const double val = model.val_loss();
    if (!std::isfinite(val)) {
      throw NonFiniteLoss("validation loss diverged at epoch " +
                          std::to_string(epoch));
    }
    res.history.push_back({epoch, lr, train_loss, val});

    if (val < best_val - cfg.min_improve) {
      best_val = val;
      res.best_epoch = epoch;
      snapshot();
      plateau_bad = 0;
      early_bad = 0;
    } else {
      ++plateau_bad;
      ++early_bad;
    }
    if (plateau_bad >= cfg.plateau_patience) {
      lr *= cfg.plateau_factor;
      plateau_bad = 0;
    }
    if (early_bad >= cfg.early_patience) break;
  }

  for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best[i];
  res.best_val = best_val;
  return res;
}

}  // namespace latticeforge
