#include "sglayout/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sglayout/errors.hpp"

namespace sglayout::ad {

namespace {
constexpr double kProbEps = 1e-7;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

int Tape::push(Node n) {
  compute(n);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::constant(std::vector<double> v) {
  Node n;
  n.op = Op::kConstant;
  n.val = std::move(v);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::param_slice(std::size_t offset, int len) {
  Node n;
  n.op = Op::kParamSlice;
  n.w_off = offset;
  n.i0 = len;
  return push(std::move(n));
}

int Tape::concat(const std::vector<int>& xs) {
  Node n;
  n.op = Op::kConcat;
  n.ins = xs;
  return push(std::move(n));
}

int Tape::slice(int x, int offset, int len) {
  Node n;
  n.op = Op::kSlice;
  n.a = x;
  n.i0 = offset;
  n.i1 = len;
  return push(std::move(n));
}

int Tape::affine(std::size_t w_off, std::size_t b_off, int out_dim, int x) {
  Node n;
  n.op = Op::kAffine;
  n.a = x;
  n.w_off = w_off;
  n.b_off = b_off;
  n.i0 = out_dim;
  n.i1 = width(x);
  return push(std::move(n));
}

int Tape::relu(int x) {
  Node n;
  n.op = Op::kRelu;
  n.a = x;
  return push(std::move(n));
}

int Tape::mean(const std::vector<int>& xs) {
  if (xs.empty()) throw std::invalid_argument("tape mean: no inputs");
  Node n;
  n.op = Op::kMean;
  n.ins = xs;
  return push(std::move(n));
}

int Tape::logistic(int x) {
  Node n;
  n.op = Op::kLogistic;
  n.a = x;
  return push(std::move(n));
}

int Tape::softmax_rows(int x, int n_classes) {
  if (width(x) % n_classes != 0)
    throw std::invalid_argument("tape softmax_rows: width not divisible");
  Node n;
  n.op = Op::kSoftmaxRows;
  n.a = x;
  n.i0 = n_classes;
  return push(std::move(n));
}

int Tape::box_decode(int x) {
  if (width(x) != 4) throw std::invalid_argument("tape box_decode: need 4");
  Node n;
  n.op = Op::kBoxDecode;
  n.a = x;
  return push(std::move(n));
}

int Tape::sum(int x) {
  Node n;
  n.op = Op::kSum;
  n.a = x;
  return push(std::move(n));
}

int Tape::mse(int x, std::vector<double> target) {
  if (width(x) != static_cast<int>(target.size()))
    throw DataError("tape mse: shape mismatch");
  Node n;
  n.op = Op::kMse;
  n.a = x;
  n.aux = std::move(target);
  return push(std::move(n));
}

int Tape::sse(int x, std::vector<double> target) {
  if (width(x) != static_cast<int>(target.size()))
    throw DataError("tape sse: shape mismatch");
  Node n;
  n.op = Op::kSse;
  n.a = x;
  n.aux = std::move(target);
  return push(std::move(n));
}

int Tape::bce_mean(int probs, std::vector<double> target) {
  if (width(probs) != static_cast<int>(target.size()))
    throw DataError("tape bce_mean: shape mismatch");
  Node n;
  n.op = Op::kBceMean;
  n.a = probs;
  n.aux = std::move(target);
  return push(std::move(n));
}

int Tape::ce_mean(int probs, std::vector<std::uint8_t> labels, int n_classes) {
  if (width(probs) != static_cast<int>(labels.size()) * n_classes)
    throw DataError("tape ce_mean: shape mismatch");
  Node n;
  n.op = Op::kCeMean;
  n.a = probs;
  n.i0 = n_classes;
  n.labels = std::move(labels);
  return push(std::move(n));
}

int Tape::add_weighted(std::vector<std::pair<double, int>> terms) {
  Node n;
  n.op = Op::kAddWeighted;
  n.ins.reserve(terms.size());
  n.aux.reserve(terms.size());
  for (const auto& [w, id] : terms) {
    if (width(id) != 1)
      throw std::invalid_argument("tape add_weighted: non-scalar term");
    n.ins.push_back(id);
    n.aux.push_back(w);
  }
  return push(std::move(n));
}

double Tape::scalar(int id) const {
  const auto& v = nodes_[id].val;
  if (v.size() != 1) throw NumericalError("tape: node is not a scalar");
  return v[0];
}

void Tape::compute(Node& n) {
  switch (n.op) {
    case Op::kConstant:
      break;
    case Op::kParamSlice: {
      n.val.assign(p(n.w_off), p(n.w_off) + n.i0);
      break;
    }
    case Op::kConcat: {
      n.val.clear();
      for (const int id : n.ins) {
        const auto& v = nodes_[id].val;
        n.val.insert(n.val.end(), v.begin(), v.end());
      }
      break;
    }
    case Op::kSlice: {
      const auto& x = nodes_[n.a].val;
      n.val.assign(x.begin() + n.i0, x.begin() + n.i0 + n.i1);
      break;
    }
    case Op::kAffine: {
      const auto& x = nodes_[n.a].val;
      const int out = n.i0, in = n.i1;
      const double* W = p(n.w_off);
      const double* b = p(n.b_off);
      n.val.assign(out, 0.0);
      for (int r = 0; r < out; ++r) {
        double acc = b[r];
        const double* row = W + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) acc += row[c] * x[c];
        n.val[r] = acc;
      }
      break;
    }
    case Op::kRelu: {
      const auto& x = nodes_[n.a].val;
      n.val.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        n.val[i] = x[i] > 0.0 ? x[i] : 0.0;
      break;
    }
    case Op::kMean: {
      const auto& first = nodes_[n.ins[0]].val;
      n.val.assign(first.begin(), first.end());
      for (std::size_t k = 1; k < n.ins.size(); ++k) {
        const auto& v = nodes_[n.ins[k]].val;
        for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] += v[i];
      }
      const double inv = 1.0 / static_cast<double>(n.ins.size());
      for (auto& x : n.val) x *= inv;
      break;
    }
    case Op::kLogistic: {
      const auto& x = nodes_[n.a].val;
      n.val.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) n.val[i] = sigmoid(x[i]);
      break;
    }
    case Op::kSoftmaxRows: {
      const auto& x = nodes_[n.a].val;
      const int k = n.i0;
      n.val.resize(x.size());
      for (std::size_t r = 0; r < x.size(); r += k) {
        double mx = x[r];
        for (int j = 1; j < k; ++j) mx = std::max(mx, x[r + j]);
        double z = 0.0;
        for (int j = 0; j < k; ++j) {
          n.val[r + j] = std::exp(x[r + j] - mx);
          z += n.val[r + j];
        }
        for (int j = 0; j < k; ++j) n.val[r + j] /= z;
      }
      break;
    }
    case Op::kBoxDecode: {
      const auto& x = nodes_[n.a].val;
      const double cx = sigmoid(x[0]), cy = sigmoid(x[1]);
      const double w = sigmoid(x[2]), h = sigmoid(x[3]);
      n.val = {clamp01(cx - w / 2.0), clamp01(cy - h / 2.0),
               clamp01(cx + w / 2.0), clamp01(cy + h / 2.0)};
      break;
    }
    case Op::kSum: {
      double acc = 0.0;
      for (const double x : nodes_[n.a].val) acc += x;
      n.val = {acc};
      break;
    }
    case Op::kMse: {
      const auto& x = nodes_[n.a].val;
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - n.aux[i];
        acc += d * d;
      }
      n.val = {acc / static_cast<double>(x.size())};
      break;
    }
    case Op::kSse: {
      const auto& x = nodes_[n.a].val;
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - n.aux[i];
        acc += d * d;
      }
      n.val = {acc};
      break;
    }
    case Op::kBceMean: {
      const auto& x = nodes_[n.a].val;
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double q = std::min(1.0 - kProbEps, std::max(kProbEps, x[i]));
        const double t = n.aux[i];
        acc += -(t * std::log(q) + (1.0 - t) * std::log(1.0 - q));
      }
      n.val = {acc / static_cast<double>(x.size())};
      break;
    }
    case Op::kCeMean: {
      const auto& x = nodes_[n.a].val;
      const int k = n.i0;
      double acc = 0.0;
      for (std::size_t c = 0; c < n.labels.size(); ++c) {
        const double q =
            std::max(kProbEps, x[c * k + n.labels[c]]);
        acc += -std::log(q);
      }
      n.val = {acc / static_cast<double>(n.labels.size())};
      break;
    }
    case Op::kAddWeighted: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n.ins.size(); ++i)
        acc += n.aux[i] * nodes_[n.ins[i]].val[0];
      n.val = {acc};
      break;
    }
  }
}

void Tape::backprop(const Node& n, std::vector<double>& param_grad) {
  switch (n.op) {
    case Op::kConstant:
      break;
    case Op::kParamSlice: {
      for (int i = 0; i < n.i0; ++i) param_grad[n.w_off + i] += n.adj[i];
      break;
    }
    case Op::kConcat: {
      std::size_t pos = 0;
      for (const int id : n.ins) {
        auto& g = nodes_[id].adj;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.adj[pos + i];
        pos += g.size();
      }
      break;
    }
    case Op::kSlice: {
      auto& g = nodes_[n.a].adj;
      for (int i = 0; i < n.i1; ++i) g[n.i0 + i] += n.adj[i];
      break;
    }
    case Op::kAffine: {
      const auto& x = nodes_[n.a].val;
      auto& gx = nodes_[n.a].adj;
      const int out = n.i0, in = n.i1;
      const double* W = p(n.w_off);
      for (int r = 0; r < out; ++r) {
        const double a = n.adj[r];
        if (a == 0.0) continue;
        param_grad[n.b_off + r] += a;
        const std::size_t row = n.w_off + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) {
          param_grad[row + c] += a * x[c];
          gx[c] += a * W[static_cast<std::size_t>(r) * in + c];
        }
      }
      break;
    }
    case Op::kRelu: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      // Subgradient at exactly 0 is 0.
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) g[i] += n.adj[i];
      break;
    }
    case Op::kMean: {
      const double inv = 1.0 / static_cast<double>(n.ins.size());
      for (const int id : n.ins) {
        auto& g = nodes_[id].adj;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.adj[i] * inv;
      }
      break;
    }
    case Op::kLogistic: {
      auto& g = nodes_[n.a].adj;
      for (std::size_t i = 0; i < n.val.size(); ++i)
        g[i] += n.adj[i] * n.val[i] * (1.0 - n.val[i]);
      break;
    }
    case Op::kSoftmaxRows: {
      auto& g = nodes_[n.a].adj;
      const int k = n.i0;
      for (std::size_t r = 0; r < n.val.size(); r += k) {
        double dot = 0.0;
        for (int j = 0; j < k; ++j) dot += n.adj[r + j] * n.val[r + j];
        for (int j = 0; j < k; ++j)
          g[r + j] += n.val[r + j] * (n.adj[r + j] - dot);
      }
      break;
    }
    case Op::kBoxDecode: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      const double s[4] = {sigmoid(x[0]), sigmoid(x[1]), sigmoid(x[2]),
                           sigmoid(x[3])};
      const double u[4] = {s[0] - s[2] / 2.0, s[1] - s[3] / 2.0,
                           s[0] + s[2] / 2.0, s[1] + s[3] / 2.0};
      double du[4];
      for (int i = 0; i < 4; ++i)
        du[i] = (u[i] > 0.0 && u[i] < 1.0) ? n.adj[i] : 0.0;
      const double ds[4] = {du[0] + du[2], du[1] + du[3],
                            (du[2] - du[0]) / 2.0, (du[3] - du[1]) / 2.0};
      for (int i = 0; i < 4; ++i) g[i] += ds[i] * s[i] * (1.0 - s[i]);
      break;
    }
    case Op::kSum: {
      auto& g = nodes_[n.a].adj;
      for (auto& gi : g) gi += n.adj[0];
      break;
    }
    case Op::kMse: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      const double scale = 2.0 * n.adj[0] / static_cast<double>(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        g[i] += scale * (x[i] - n.aux[i]);
      break;
    }
    case Op::kSse: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      for (std::size_t i = 0; i < x.size(); ++i)
        g[i] += 2.0 * n.adj[0] * (x[i] - n.aux[i]);
      break;
    }
    case Op::kBceMean: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      const double inv = n.adj[0] / static_cast<double>(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= kProbEps || x[i] >= 1.0 - kProbEps) continue;
        g[i] += inv * (x[i] - n.aux[i]) / (x[i] * (1.0 - x[i]));
      }
      break;
    }
    case Op::kCeMean: {
      const auto& x = nodes_[n.a].val;
      auto& g = nodes_[n.a].adj;
      const int k = n.i0;
      const double inv = n.adj[0] / static_cast<double>(n.labels.size());
      for (std::size_t c = 0; c < n.labels.size(); ++c) {
        const std::size_t idx = c * k + n.labels[c];
        if (x[idx] <= kProbEps) continue;
        g[idx] += -inv / x[idx];
      }
      break;
    }
    case Op::kAddWeighted: {
      for (std::size_t i = 0; i < n.ins.size(); ++i)
        nodes_[n.ins[i]].adj[0] += n.adj[0] * n.aux[i];
      break;
    }
  }
}

void Tape::backward(int loss, std::vector<double>& param_grad,
                    double loss_grad) {
  if (nodes_[loss].val.size() != 1)
    throw NumericalError("tape backward: loss node is not a scalar");
  for (auto& n : nodes_) n.adj.assign(n.val.size(), 0.0);
  nodes_[loss].adj[0] = loss_grad;
  for (int i = loss; i >= 0; --i) backprop(nodes_[i], param_grad);
}

void Tape::replay() {
  for (auto& n : nodes_) compute(n);
}

}  // namespace sglayout::ad
