#include "latticeforge/tape.hpp"

#include <cmath>

namespace latticeforge {

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

const Tape::Node& Tape::at(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) {
    throw DimensionMismatch("tape node id out of range");
  }
  return nodes_[id];
}

int Tape::constant(Mat value) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

int Tape::parameter(Mat value) {
  Node n;
  n.op = Op::kParameter;
  n.needs_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  const Node& na = at(a);
  const Node& nb = at(b);
  if (na.value.cols() != nb.value.rows()) {
    throw DimensionMismatch("matmul inner dimensions differ");
  }
  Node n;
  n.op = Op::kMatmul;
  n.a = a;
  n.b = b;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.value = na.value * nb.value;
  return push(std::move(n));
}

int Tape::add_bias(int x, int bias) {
  const Node& nx = at(x);
  const Node& nb = at(bias);
  if (nb.value.rows() != 1 || nb.value.cols() != nx.value.cols()) {
    throw DimensionMismatch("bias must be a 1 x cols row vector");
  }
  Node n;
  n.op = Op::kAddBias;
  n.a = x;
  n.b = bias;
  n.needs_grad = nx.needs_grad || nb.needs_grad;
  n.value = nx.value.rowwise() + nb.value.row(0);
  return push(std::move(n));
}

int Tape::selu(int x) {
  const Node& nx = at(x);
  Node n;
  n.op = Op::kSelu;
  n.a = x;
  n.needs_grad = nx.needs_grad;
  n.value = nx.value.unaryExpr([](double v) {
    return v > 0.0 ? kSeluLambda * v
                   : kSeluLambda * kSeluAlpha * (std::exp(v) - 1.0);
  });
  return push(std::move(n));
}

int Tape::prelu(int x, int slopes) {
  const Node& nx = at(x);
  const Node& ns = at(slopes);
  if (ns.value.rows() != 1 || ns.value.cols() != nx.value.cols()) {
    throw DimensionMismatch("slopes must be a 1 x cols row vector");
  }
  Node n;
  n.op = Op::kPrelu;
  n.a = x;
  n.b = slopes;
  n.needs_grad = nx.needs_grad || ns.needs_grad;
  n.value = nx.value;
  for (Eigen::Index j = 0; j < n.value.cols(); ++j) {
    const double a = ns.value(0, j);
    for (Eigen::Index i = 0; i < n.value.rows(); ++i) {
      if (n.value(i, j) <= 0.0) n.value(i, j) *= a;
    }
  }
  return push(std::move(n));
}

int Tape::concat_cols(int a, int b) {
  const Node& na = at(a);
  const Node& nb = at(b);
  if (na.value.rows() != nb.value.rows()) {
    throw DimensionMismatch("concat_cols row counts differ");
  }
  Node n;
  n.op = Op::kConcatCols;
  n.a = a;
  n.b = b;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.value.resize(na.value.rows(), na.value.cols() + nb.value.cols());
  n.value << na.value, nb.value;
  return push(std::move(n));
}

int Tape::gather_rows(int x, std::vector<int> rows) {
  const Node& nx = at(x);
  Node n;
  n.op = Op::kGatherRows;
  n.a = x;
  n.needs_grad = nx.needs_grad;
  n.value.resize(static_cast<Eigen::Index>(rows.size()), nx.value.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= nx.value.rows()) {
      throw DimensionMismatch("gather row out of range");
    }
    n.value.row(static_cast<Eigen::Index>(i)) = nx.value.row(rows[i]);
  }
  n.idx = std::move(rows);
  return push(std::move(n));
}

int Tape::segment_mean(int x, std::vector<int> segment, int n_segments) {
  const Node& nx = at(x);
  if (static_cast<Eigen::Index>(segment.size()) != nx.value.rows()) {
    throw DimensionMismatch("segment id per input row required");
  }
  if (n_segments <= 0) throw EmptyRange("segment_mean needs segments");
  std::vector<int> counts(n_segments, 0);
  Node n;
  n.op = Op::kSegmentMean;
  n.a = x;
  n.needs_grad = nx.needs_grad;
  n.n_segments = n_segments;
  n.value = Mat::Zero(n_segments, nx.value.cols());
  for (std::size_t i = 0; i < segment.size(); ++i) {
    const int s = segment[i];
    if (s < 0 || s >= n_segments) {
      throw DimensionMismatch("segment id out of range");
    }
    n.value.row(s) += nx.value.row(static_cast<Eigen::Index>(i));
    ++counts[s];
  }
  for (int s = 0; s < n_segments; ++s) {
    if (counts[s] == 0) {
      throw IsolatedNode("segment " + std::to_string(s) + " has no rows");
    }
    n.value.row(s) /= counts[s];
  }
  n.idx = std::move(segment);
  return push(std::move(n));
}

int Tape::mse_loss(int pred, int target) {
  const Node& np = at(pred);
  const Node& nt = at(target);
  if (np.value.rows() != nt.value.rows() ||
      np.value.cols() != nt.value.cols()) {
    throw DimensionMismatch("loss operands differ in shape");
  }
  if (np.value.size() == 0) throw EmptyRange("loss over empty batch");
  Node n;
  n.op = Op::kMseLoss;
  n.a = pred;
  n.b = target;
  n.needs_grad = np.needs_grad || nt.needs_grad;
  n.value.resize(1, 1);
  n.value(0, 0) =
      (np.value - nt.value).squaredNorm() / static_cast<double>(np.value.size());
  return push(std::move(n));
}

double Tape::scalar(int id) const {
  const Node& n = at(id);
  if (n.value.size() != 1) throw DimensionMismatch("node is not a scalar");
  return n.value(0, 0);
}

void Tape::backward(int loss) {
  Node& top = nodes_.at(loss);
  if (top.value.size() != 1) {
    throw DimensionMismatch("backward starts from a scalar");
  }
  for (Node& n : nodes_) {
    if (n.needs_grad) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
  if (!top.needs_grad) return;
  top.grad(0, 0) = 1.0;

  for (int id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
      case Op::kParameter:
        break;
      case Op::kMatmul: {
        Node& na = nodes_[n.a];
        Node& nb = nodes_[n.b];
        if (na.needs_grad) na.grad += g * nb.value.transpose();
        if (nb.needs_grad) nb.grad += na.value.transpose() * g;
        break;
      }
      case Op::kAddBias: {
        Node& nx = nodes_[n.a];
        Node& nb = nodes_[n.b];
        if (nx.needs_grad) nx.grad += g;
        if (nb.needs_grad) nb.grad += g.colwise().sum();
        break;
      }
      case Op::kSelu: {
        Node& nx = nodes_[n.a];
        if (nx.needs_grad) {
          nx.grad += g.binaryExpr(nx.value, [](double gv, double xv) {
            return gv * (xv > 0.0
                             ? kSeluLambda
                             : kSeluLambda * kSeluAlpha * std::exp(xv));
          });
        }
        break;
      }
      case Op::kPrelu: {
        Node& nx = nodes_[n.a];
        Node& ns = nodes_[n.b];
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          const double a = ns.value(0, j);
          for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double xv = nx.value(i, j);
            if (nx.needs_grad) {
              nx.grad(i, j) += g(i, j) * (xv > 0.0 ? 1.0 : a);
            }
            if (ns.needs_grad && xv <= 0.0) {
              ns.grad(0, j) += g(i, j) * xv;
            }
          }
        }
        break;
      }
      case Op::kConcatCols: {
        Node& na = nodes_[n.a];
        Node& nb = nodes_[n.b];
        if (na.needs_grad) na.grad += g.leftCols(na.value.cols());
        if (nb.needs_grad) nb.grad += g.rightCols(nb.value.cols());
        break;
      }
      case Op::kGatherRows: {
        Node& nx = nodes_[n.a];
        if (nx.needs_grad) {
          for (std::size_t i = 0; i < n.idx.size(); ++i) {
            nx.grad.row(n.idx[i]) += g.row(static_cast<Eigen::Index>(i));
          }
        }
        break;
      }
      case Op::kSegmentMean: {
        Node& nx = nodes_[n.a];
        if (nx.needs_grad) {
          std::vector<int> counts(n.n_segments, 0);
          for (int s : n.idx) ++counts[s];
          for (std::size_t i = 0; i < n.idx.size(); ++i) {
            const int s = n.idx[i];
            nx.grad.row(static_cast<Eigen::Index>(i)) +=
                g.row(s) / counts[s];
          }
        }
        break;
      }
      case Op::kMseLoss: {
        Node& np = nodes_[n.a];
        Node& nt = nodes_[n.b];
        const double scale =
            2.0 * g(0, 0) / static_cast<double>(np.value.size());
        if (np.needs_grad) np.grad += scale * (np.value - nt.value);
        if (nt.needs_grad) nt.grad -= scale * (np.value - nt.value);
        break;
      }
    }
  }
}

}  // namespace latticeforge
