#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latticeforge/common.hpp"

namespace latticeforge {

// Matrix-valued reverse-mode tape. A fresh graph is built eagerly per step:
// each op computes its value on creation, backward() then fills gradients in
// one reverse sweep. Node ids index into the tape.
class Tape {
 public:
  using Mat = Eigen::MatrixXd;

  int constant(Mat value);
  int parameter(Mat value);

  int matmul(int a, int b);
  int add_bias(int x, int bias);        // bias is 1 x cols, added to each row
  int selu(int x);
  int prelu(int x, int slopes);         // slopes is 1 x cols, one per unit
  int concat_cols(int a, int b);
  int gather_rows(int x, std::vector<int> rows);
  int segment_mean(int x, std::vector<int> segment, int n_segments);
  int mse_loss(int pred, int target);

  void backward(int loss);

  const Mat& value(int id) const { return nodes_.at(id).value; }
  const Mat& grad(int id) const { return nodes_.at(id).grad; }
  double scalar(int id) const;
  std::size_t size() const { return nodes_.size(); }

  static constexpr double kSeluLambda = 1.0507009873554804934193349852946;
  static constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

 private:
  enum class Op {
    kConstant,
    kParameter,
    kMatmul,
    kAddBias,
    kSelu,
    kPrelu,
    kConcatCols,
    kGatherRows,
    kSegmentMean,
    kMseLoss,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    bool needs_grad = false;
    Mat value;
    Mat grad;
    std::vector<int> idx;  // gather rows or segment ids
    int n_segments = 0;
  };

  int push(Node n);
  const Node& at(int id) const;

  std::vector<Node> nodes_;
};

}  // namespace latticeforge
