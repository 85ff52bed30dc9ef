#pragma once

#include <cstdint>
#include <vector>

#include "latticeforge/tape.hpp"

namespace latticeforge {

enum class Activation { kLinear, kSelu, kPrelu };

// Binding between a model parameter and its node on the current tape; the
// optimizer reads grads through it after backward().
struct ParamSlot {
  Eigen::MatrixXd* param;
  int node;
};

struct DenseLayer {
  Activation act = Activation::kLinear;
  Eigen::MatrixXd w;       // in x out
  Eigen::MatrixXd b;       // 1 x out
  Eigen::MatrixXd slopes;  // 1 x out, PReLU only

  // Scaled-uniform fan-in init for weights, zero bias, 0.25 PReLU slopes.
  static DenseLayer make(int in, int out, Activation act,
                         std::mt19937_64& rng);

  // Pushes the layer onto the tape and returns the output node. With slots,
  // parameters are trainable; without, they enter as constants (inference).
  int forward(Tape& t, int x, std::vector<ParamSlot>* slots);

  int in_dim() const { return static_cast<int>(w.rows()); }
  int out_dim() const { return static_cast<int>(w.cols()); }
  int n_params() const;
  void collect(std::vector<Eigen::MatrixXd*>& out);
};

struct Mlp {
  std::vector<DenseLayer> layers;

  static Mlp make(const std::vector<int>& dims,
                  const std::vector<Activation>& acts, std::uint64_t seed);
  int forward(Tape& t, int x, std::vector<ParamSlot>* slots);
  int n_params() const;
  std::vector<Eigen::MatrixXd*> parameters();
};

struct StandardScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd std;  // floored at 1e-12

  void fit(const Eigen::MatrixXd& x);  // rows are samples
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& x) const;
};

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

// 1 - SS_res / SS_tot; throws DegenerateTarget when the target variance
// is below 1e-15.
double r2_score(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

// Nadam: Adam moments with a Nesterov-style lookahead on the first moment.
class Nadam {
 public:
  explicit Nadam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const Tape& tape, const std::vector<ParamSlot>& slots, double lr);
  long steps_taken() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

struct FitConfig {
  int epochs = 1000;
  double lr = 1e-3;
  int batch_size = 0;  // <= 0 trains full batch
  double plateau_factor = 0.5;
  int plateau_patience = 50;
  int early_patience = 200;
  double min_improve = 1e-4;  // on validation loss
  std::uint64_t seed = 0;     // shuffle stream
};

struct EpochStats {
  int epoch;
  double lr;
  double train_loss;
  double val_loss;
};

struct FitResult {
  std::vector<EpochStats> history;
  double best_val = 0.0;
  int best_epoch = -1;
};

// What the generic training loop needs from a model. build_loss constructs
// the scaled-loss graph over the given training rows and binds parameters.
class TrainableModel {
 public:
  virtual ~TrainableModel() = default;
  virtual int n_train() const = 0;
  virtual int build_loss(Tape& t, const std::vector<int>& rows,
                         std::vector<ParamSlot>& slots) = 0;
  virtual double val_loss() = 0;
  virtual std::vector<Eigen::MatrixXd*> parameters() = 0;
};

// Epoch loop with seeded shuffling, Nadam, plateau LR halving, early
// stopping, and best-validation parameter restore. Throws NonFiniteLoss as
// soon as any loss stops being finite.
FitResult fit(TrainableModel& model, const FitConfig& cfg);

}  // namespace latticeforge
