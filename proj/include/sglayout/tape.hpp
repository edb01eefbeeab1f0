#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace sglayout::ad {

// Minimal reverse-mode tape over vector-valued nodes. The primitive set is
// exactly what the embedding network, prediction heads and losses need.
// Parameters live in one external flat buffer; affine weights are addressed
// by offset so their gradients scatter straight into a flat gradient vector.
// All reductions run in recorded input order, which makes the forward and
// backward passes bit-reproducible.
class Tape {
 public:
  explicit Tape(const std::vector<double>& params) : params_(&params) {}

  int constant(std::vector<double> v);
  int param_slice(std::size_t offset, int len);
  int concat(const std::vector<int>& xs);
  int slice(int x, int offset, int len);
  // y = W x + b with W row-major (out_dim x in_dim) at w_off, b at b_off.
  int affine(std::size_t w_off, std::size_t b_off, int out_dim, int x);
  int relu(int x);
  int mean(const std::vector<int>& xs);  // elementwise, in argument order
  int logistic(int x);
  int softmax_rows(int x, int n_classes);
  // (cx, cy, w, h) logits -> logistic -> corner box clamped to the canvas.
  int box_decode(int x);
  int sum(int x);  // scalar
  int mse(int x, std::vector<double> target);
  int sse(int x, std::vector<double> target);
  // Mean binary cross-entropy; probabilities clamped to [1e-7, 1 - 1e-7].
  int bce_mean(int probs, std::vector<double> target);
  // Mean categorical cross-entropy over cells; probs laid out cell-major.
  int ce_mean(int probs, std::vector<std::uint8_t> labels, int n_classes);
  int add_weighted(std::vector<std::pair<double, int>> terms);  // scalars

  const std::vector<double>& value(int id) const { return nodes_[id].val; }
  double scalar(int id) const;
  int width(int id) const { return static_cast<int>(nodes_[id].val.size()); }
  std::size_t n_nodes() const { return nodes_.size(); }

  // Reverse pass from a scalar node; parameter gradients accumulate into
  // param_grad (sized like the flat parameter buffer).
  void backward(int loss, std::vector<double>& param_grad,
                double loss_grad = 1.0);

  // Recomputes every node in recording order against the current parameter
  // buffer. Replaying without parameter changes reproduces values
  // bit-identically.
  void replay();

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParamSlice,
    kConcat,
    kSlice,
    kAffine,
    kRelu,
    kMean,
    kLogistic,
    kSoftmaxRows,
    kBoxDecode,
    kSum,
    kMse,
    kSse,
    kBceMean,
    kCeMean,
    kAddWeighted,
  };

  struct Node {
    Op op;
    int a = -1;                    // primary input
    int i0 = 0, i1 = 0;            // op-specific ints
    std::size_t w_off = 0, b_off = 0;
    std::vector<int> ins;          // concat/mean inputs
    std::vector<double> aux;       // targets / weights
    std::vector<std::uint8_t> labels;
    std::vector<double> val;
    std::vector<double> adj;
  };

  const std::vector<double>* params_;
  std::vector<Node> nodes_;

  int push(Node n);
  void compute(Node& n);
  void backprop(const Node& n, std::vector<double>& param_grad);
  const double* p(std::size_t off) const { return params_->data() + off; }
};

}  // namespace sglayout::ad
