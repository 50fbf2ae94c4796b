#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomsign/errors.hpp"
#include "geomsign/gemm.hpp"
#include "geomsign/tensor.hpp"

namespace geomsign {

// Reverse-mode tape over dense tensors. Define-by-run: every operator
// appends a node holding its output value plus whatever it needs to run its
// backward rule. backward() walks the records in reverse topological order
// (which is just reverse creation order) and accumulates gradients into the
// leaves that asked for them.
//
// Every forward op validates its output for NaN/Inf and raises NumericsError
// naming the op and the caller-provided context string.
template <typename Real>
class Tape {
 public:
  using Id = uint32_t;
  static constexpr Id kNone = std::numeric_limits<Id>::max();

  enum class Op {
    Leaf,
    MatMul,
    Add,
    Mul,
    Gelu,
    LayerNorm,
    Conv1dTime,
    GatherRows,
    SegmentSum,
    MeanOverAxes,
    Reshape,
    SoftmaxCE,
  };

  static const char* op_name(Op op) {
    switch (op) {
      case Op::Leaf: return "leaf";
      case Op::MatMul: return "matmul";
      case Op::Add: return "add";
      case Op::Mul: return "mul";
      case Op::Gelu: return "gelu";
      case Op::LayerNorm: return "layer_norm";
      case Op::Conv1dTime: return "conv1d_time";
      case Op::GatherRows: return "gather_rows";
      case Op::SegmentSum: return "segment_sum";
      case Op::MeanOverAxes: return "mean_over_axes";
      case Op::Reshape: return "reshape";
      case Op::SoftmaxCE: return "softmax_cross_entropy";
    }
    return "?";
  }

  void set_context(std::string ctx) { context_ = std::move(ctx); }
  const std::string& context() const { return context_; }

  Id leaf(Tensor<Real> value, bool requires_grad = false) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    return push(std::move(n));
  }

  const Tensor<Real>& val(Id id) const { return nodes_[id].value; }
  bool requires_grad(Id id) const { return nodes_[id].requires_grad; }

  // Gradient accumulated by the last backward(); null when the node was not
  // reached (disconnected) or never required gradients.
  const Tensor<Real>* grad_of(Id id) const {
    return grads_.size() > id && !grads_[id].data.empty() ? &grads_[id] : nullptr;
  }

  size_t size() const { return nodes_.size(); }

  void clear() {
    nodes_.clear();
    grads_.clear();
  }

  // ---- operators -----------------------------------------------------

  Id matmul(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.shape[1] != tb.shape[0])
      fail_shape("matmul", ta, tb);
    Node n = binary(Op::MatMul, a, b);
    n.value = Tensor<Real>({ta.shape[0], tb.shape[1]});
    gemm(ta.shape[0], ta.shape[1], tb.shape[1], ta.data.data(), tb.data.data(),
         n.value.data.data());
    return push(std::move(n));
  }

  // Same-shape add, or broadcast of b when b's shape is a trailing suffix of
  // a's (bias over leading axes).
  Id add(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    const bool same = ta.same_shape(tb);
    if (!same && !is_suffix(tb.shape, ta.shape)) fail_shape("add", ta, tb);
    Node n = binary(Op::Add, a, b);
    n.value = ta;
    if (same) {
      for (size_t i = 0; i < n.value.numel(); ++i) n.value.data[i] += tb.data[i];
    } else {
      const size_t m = tb.numel();
      for (size_t i = 0; i < n.value.numel(); ++i) n.value.data[i] += tb.data[i % m];
    }
    return push(std::move(n));
  }

  Id mul(Id a, Id b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    if (!ta.same_shape(tb)) fail_shape("mul", ta, tb);
    Node n = binary(Op::Mul, a, b);
    n.value = ta;
    for (size_t i = 0; i < n.value.numel(); ++i) n.value.data[i] *= tb.data[i];
    return push(std::move(n));
  }

  // Exact Gaussian-CDF form: x * Phi(x)
  Id gelu(Id x) {
    const auto& tx = val(x);
    Node n = unary(Op::Gelu, x);
    n.value = Tensor<Real>(tx.shape);
    for (size_t i = 0; i < tx.numel(); ++i) {
      const double v = static_cast<double>(tx.data[i]);
      n.value.data[i] = static_cast<Real>(v * 0.5 * (1.0 + std::erf(v * kInvSqrt2)));
    }
    return push(std::move(n));
  }

  // Normalizes the last axis; gamma/beta are 1-d of that length.
  Id layer_norm(Id x, Id gamma, Id beta) {
    const auto& tx = val(x);
    const auto& tg = val(gamma);
    const auto& tb = val(beta);
    if (tx.rank() < 1 || tg.rank() != 1 || tb.rank() != 1 ||
        tg.shape[0] != tx.shape.back() || tb.shape[0] != tx.shape.back())
      fail_shape("layer_norm", tx, tg);
    const size_t c = tx.shape.back();
    const size_t rows = tx.numel() / c;
    Node n;
    n.op = Op::LayerNorm;
    n.in = {x, gamma, beta};
    n.requires_grad = nodes_[x].requires_grad || nodes_[gamma].requires_grad ||
                      nodes_[beta].requires_grad;
    n.value = Tensor<Real>(tx.shape);
    n.saved = Tensor<Real>({rows, 2});  // per-row mean, invstd
    for (size_t r = 0; r < rows; ++r) {
      const Real* xr = tx.data.data() + r * c;
      double mean = 0;
      for (size_t j = 0; j < c; ++j) mean += xr[j];
      mean /= static_cast<double>(c);
      double var = 0;
      for (size_t j = 0; j < c; ++j) {
        const double d = xr[j] - mean;
        var += d * d;
      }
      var /= static_cast<double>(c);
      const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
      n.saved.at(r, 0) = static_cast<Real>(mean);
      n.saved.at(r, 1) = static_cast<Real>(inv);
      Real* yr = n.value.data.data() + r * c;
      for (size_t j = 0; j < c; ++j)
        yr[j] = static_cast<Real>((xr[j] - mean) * inv) * tg.data[j] + tb.data[j];
    }
    return push(std::move(n));
  }

  // x: [..., T, N, Cin], w: [Cout, Cin, K] with K odd; zero padding of
  // (K-1)/2 on the time axis so T is preserved. Dense Cin->Cout mixing,
  // nodes independent.
  Id conv1d_time(Id x, Id w) {
    const auto& tx = val(x);
    const auto& tw = val(w);
    if (tx.rank() < 3 || tw.rank() != 3 || tw.shape[1] != tx.shape.back() ||
        tw.shape[2] % 2 == 0)
      fail_shape("conv1d_time", tx, tw);
    const size_t r = tx.rank();
    const size_t t_len = tx.shape[r - 3];
    const size_t n_pos = tx.shape[r - 2];
    const size_t cin = tx.shape[r - 1];
    const size_t cout = tw.shape[0];
    const size_t kk = tw.shape[2];
    const size_t lead = tx.numel() / (t_len * n_pos * cin);
    const int pad = static_cast<int>(kk - 1) / 2;

    // w repacked per tap as Cin x Cout so each tap is one GEMM
    std::vector<Real> wk(kk * cin * cout);
    for (size_t co = 0; co < cout; ++co)
      for (size_t ci = 0; ci < cin; ++ci)
        for (size_t k = 0; k < kk; ++k)
          wk[(k * cin + ci) * cout + co] = tw.data[(co * cin + ci) * kk + k];

    std::vector<size_t> out_shape = tx.shape;
    out_shape[r - 1] = cout;
    Node n = binary(Op::Conv1dTime, x, w);
    n.value = Tensor<Real>(out_shape);
#pragma omp parallel for schedule(static)
    for (int64_t l = 0; l < static_cast<int64_t>(lead); ++l) {
      const Real* xl = tx.data.data() + static_cast<size_t>(l) * t_len * n_pos * cin;
      Real* yl = n.value.data.data() + static_cast<size_t>(l) * t_len * n_pos * cout;
      for (int dt = -pad; dt <= pad; ++dt) {
        const size_t t0 = static_cast<size_t>(std::max(0, -dt));
        const int64_t t1s = static_cast<int64_t>(t_len) - 1 - std::max(0, dt);
        if (t1s < static_cast<int64_t>(t0)) continue;
        const size_t rows = (static_cast<size_t>(t1s) - t0 + 1) * n_pos;
        gemm_accum(rows, cin, cout, xl + (t0 + dt) * n_pos * cin,
                   wk.data() + static_cast<size_t>(dt + pad) * cin * cout,
                   yl + t0 * n_pos * cout);
      }
    }
    return push(std::move(n));
  }

  // x must be 2-d; returns rows[i]-th row of x for each i.
  Id gather_rows(Id x, std::vector<uint32_t> rows) {
    const auto& tx = val(x);
    if (tx.rank() != 2) fail_shape("gather_rows", tx, tx);
    for (uint32_t r : rows)
      if (r >= tx.shape[0])
        throw std::invalid_argument("gather_rows: index " + std::to_string(r) +
                                    " out of range for " + tx.shape_str());
    Node n = unary(Op::GatherRows, x);
    const size_t c = tx.shape[1];
    n.value = Tensor<Real>({rows.size(), c});
    for (size_t i = 0; i < rows.size(); ++i)
      std::copy_n(tx.data.data() + static_cast<size_t>(rows[i]) * c, c,
                  n.value.data.data() + i * c);
    n.idx = std::move(rows);
    return push(std::move(n));
  }

  // Scatter-add of 2-d rows by segment id; accumulation order is the row
  // order, so results are reproducible.
  Id segment_sum(Id x, std::vector<uint32_t> segments, size_t num_segments) {
    const auto& tx = val(x);
    if (tx.rank() != 2 || segments.size() != tx.shape[0]) fail_shape("segment_sum", tx, tx);
    for (uint32_t s : segments)
      if (s >= num_segments)
        throw std::invalid_argument("segment_sum: segment id " + std::to_string(s) +
                                    " >= " + std::to_string(num_segments));
    Node n = unary(Op::SegmentSum, x);
    const size_t c = tx.shape[1];
    n.value = Tensor<Real>({num_segments, c});
    for (size_t i = 0; i < segments.size(); ++i) {
      const Real* src = tx.data.data() + i * c;
      Real* dst = n.value.data.data() + static_cast<size_t>(segments[i]) * c;
      for (size_t j = 0; j < c; ++j) dst[j] += src[j];
    }
    n.idx = std::move(segments);
    return push(std::move(n));
  }

  // Mean over the given axes; reduced axes are dropped from the shape.
  Id mean_over_axes(Id x, std::vector<size_t> axes) {
    const auto& tx = val(x);
    std::sort(axes.begin(), axes.end());
    axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
    for (size_t ax : axes)
      if (ax >= tx.rank()) throw std::invalid_argument("mean_over_axes: axis out of range");
    if (axes.empty()) throw std::invalid_argument("mean_over_axes: no axes given");

    std::vector<size_t> out_shape;
    for (size_t d = 0; d < tx.rank(); ++d)
      if (!std::count(axes.begin(), axes.end(), d)) out_shape.push_back(tx.shape[d]);
    if (out_shape.empty()) out_shape = {1};

    Node n = unary(Op::MeanOverAxes, x);
    n.axes = axes;
    n.value = Tensor<Real>(out_shape);
    const auto ostride = reduced_strides(tx.shape, axes);
    size_t count = 1;
    for (size_t ax : axes) count *= tx.shape[ax];
    const Real inv = static_cast<Real>(1.0 / static_cast<double>(count));
    std::vector<size_t> ix(tx.rank(), 0);
    for (size_t flat = 0; flat < tx.numel(); ++flat) {
      size_t o = 0;
      for (size_t d = 0; d < tx.rank(); ++d) o += ix[d] * ostride[d];
      n.value.data[o] += tx.data[flat] * inv;
      for (size_t d = tx.rank(); d-- > 0;) {
        if (++ix[d] < tx.shape[d]) break;
        ix[d] = 0;
      }
    }
    return push(std::move(n));
  }

  Id reshape(Id x, std::vector<size_t> new_shape) {
    const auto& tx = val(x);
    if (Tensor<Real>::count(new_shape) != tx.numel()) fail_shape("reshape", tx, tx);
    Node n = unary(Op::Reshape, x);
    n.value = Tensor<Real>(std::move(new_shape), tx.data);
    return push(std::move(n));
  }

  // Mean over rows of (logsumexp(logits_r) - logits_r[label_r]); scalar.
  Id softmax_cross_entropy(Id logits, std::vector<int> labels) {
    const auto& tl = val(logits);
    if (tl.rank() != 2 || labels.size() != tl.shape[0])
      fail_shape("softmax_cross_entropy", tl, tl);
    const size_t b = tl.shape[0];
    const size_t c = tl.shape[1];
    for (int lab : labels)
      if (lab < 0 || static_cast<size_t>(lab) >= c)
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    Node n = unary(Op::SoftmaxCE, logits);
    n.labels = std::move(labels);
    n.saved = Tensor<Real>({b, c});  // probabilities
    double loss = 0;
    for (size_t r = 0; r < b; ++r) {
      const Real* lr = tl.data.data() + r * c;
      double mx = lr[0];
      for (size_t j = 1; j < c; ++j) mx = std::max<double>(mx, lr[j]);
      double se = 0;
      for (size_t j = 0; j < c; ++j) se += std::exp(static_cast<double>(lr[j]) - mx);
      const double lse = mx + std::log(se);
      for (size_t j = 0; j < c; ++j)
        n.saved.at(r, j) = static_cast<Real>(std::exp(static_cast<double>(lr[j]) - lse));
      loss += lse - static_cast<double>(lr[static_cast<size_t>(n.labels[r])]);
    }
    n.value = Tensor<Real>::scalar(static_cast<Real>(loss / static_cast<double>(b)));
    return push(std::move(n));
  }

  // ---- reverse pass ----------------------------------------------------

  void backward(Id loss) {
    const auto& tl = val(loss);
    if (tl.numel() != 1)
      throw std::invalid_argument("backward: loss must be scalar, got " + tl.shape_str());
    grads_.assign(nodes_.size(), Tensor<Real>());
    if (!nodes_[loss].requires_grad) return;  // nothing depends on a parameter
    grads_[loss] = Tensor<Real>(tl.shape);
    grads_[loss].data[0] = Real(1);
    for (size_t i = loss + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || grads_[i].data.empty()) continue;
      if (n.op != Op::Leaf) {
        backprop(n, grads_[i]);
        grads_[i] = Tensor<Real>();  // free non-leaf gradients as we go
      }
    }
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  static constexpr double kLayerNormEps = 1e-5;

  struct Node {
    Op op = Op::Leaf;
    std::array<Id, 3> in = {kNone, kNone, kNone};
    bool requires_grad = false;
    Tensor<Real> value;
    Tensor<Real> saved;          // LN row stats / CE probabilities
    std::vector<uint32_t> idx;   // gather rows / segment ids
    std::vector<size_t> axes;    // mean axes
    std::vector<int> labels;     // CE labels
  };

  Node unary(Op op, Id x) {
    Node n;
    n.op = op;
    n.in = {x, kNone, kNone};
    n.requires_grad = nodes_[x].requires_grad;
    return n;
  }

  Node binary(Op op, Id a, Id b) {
    Node n;
    n.op = op;
    n.in = {a, b, kNone};
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    return n;
  }

  Id push(Node n) {
    check_finite(n.value, n.op);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
  }

  void check_finite(const Tensor<Real>& t, Op op) const {
    double acc = 0;
    for (const Real v : t.data) acc += std::abs(static_cast<double>(v));
    if (!std::isfinite(acc)) {
      std::string msg = std::string("non-finite values out of op '") + op_name(op) + "'";
      if (!context_.empty()) msg += " (" + context_ + ")";
      throw NumericsError(msg);
    }
  }

  [[noreturn]] void fail_shape(const char* op, const Tensor<Real>& a, const Tensor<Real>& b) const {
    throw std::invalid_argument(std::string(op) + ": incompatible shapes " + a.shape_str() +
                                " and " + b.shape_str());
  }

  static bool is_suffix(const std::vector<size_t>& small, const std::vector<size_t>& big) {
    if (small.size() > big.size() || small.empty()) return false;
    return std::equal(small.rbegin(), small.rend(), big.rbegin());
  }

  static std::vector<size_t> reduced_strides(const std::vector<size_t>& shape,
                                             const std::vector<size_t>& axes) {
    std::vector<size_t> stride(shape.size(), 0);
    size_t s = 1;
    for (size_t d = shape.size(); d-- > 0;) {
      if (!std::count(axes.begin(), axes.end(), d)) {
        stride[d] = s;
        s *= shape[d];
      }
    }
    return stride;
  }

  Tensor<Real>& grad_buf(Id id) {
    if (grads_[id].data.empty()) grads_[id] = Tensor<Real>(nodes_[id].value.shape);
    return grads_[id];
  }

  bool wants_grad(Id id) const { return id != kNone && nodes_[id].requires_grad; }

  void backprop(Node& n, const Tensor<Real>& g) {
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        const auto& a = nodes_[n.in[0]].value;
        const auto& b = nodes_[n.in[1]].value;
        if (wants_grad(n.in[0]))
          gemm_bt_accum(a.shape[0], b.shape[1], a.shape[1], g.data.data(), b.data.data(),
                        grad_buf(n.in[0]).data.data());
        if (wants_grad(n.in[1]))
          gemm_at_accum(a.shape[1], a.shape[0], b.shape[1], a.data.data(), g.data.data(),
                        grad_buf(n.in[1]).data.data());
        break;
      }
      case Op::Add: {
        if (wants_grad(n.in[0])) {
          auto& da = grad_buf(n.in[0]);
          for (size_t i = 0; i < g.numel(); ++i) da.data[i] += g.data[i];
        }
        if (wants_grad(n.in[1])) {
          auto& db = grad_buf(n.in[1]);
          const size_t m = db.numel();
          for (size_t i = 0; i < g.numel(); ++i) db.data[i % m] += g.data[i];
        }
        break;
      }
      case Op::Mul: {
        const auto& a = nodes_[n.in[0]].value;
        const auto& b = nodes_[n.in[1]].value;
        if (wants_grad(n.in[0])) {
          auto& da = grad_buf(n.in[0]);
          for (size_t i = 0; i < g.numel(); ++i) da.data[i] += g.data[i] * b.data[i];
        }
        if (wants_grad(n.in[1])) {
          auto& db = grad_buf(n.in[1]);
          for (size_t i = 0; i < g.numel(); ++i) db.data[i] += g.data[i] * a.data[i];
        }
        break;
      }
      case Op::Gelu: {
        const auto& x = nodes_[n.in[0]].value;
        auto& dx = grad_buf(n.in[0]);
        for (size_t i = 0; i < g.numel(); ++i) {
          const double v = static_cast<double>(x.data[i]);
          const double phi = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
          const double pdf = std::exp(-0.5 * v * v) * 0.39894228040143267794;  // 1/sqrt(2*pi)
          dx.data[i] += g.data[i] * static_cast<Real>(phi + v * pdf);
        }
        break;
      }
      case Op::LayerNorm:
        backprop_layer_norm(n, g);
        break;
      case Op::Conv1dTime:
        backprop_conv(n, g);
        break;
      case Op::GatherRows: {
        auto& dx = grad_buf(n.in[0]);
        const size_t c = dx.shape[1];
        for (size_t i = 0; i < n.idx.size(); ++i) {
          Real* dst = dx.data.data() + static_cast<size_t>(n.idx[i]) * c;
          const Real* src = g.data.data() + i * c;
          for (size_t j = 0; j < c; ++j) dst[j] += src[j];
        }
        break;
      }
      case Op::SegmentSum: {
        auto& dx = grad_buf(n.in[0]);
        const size_t c = dx.shape[1];
        for (size_t i = 0; i < n.idx.size(); ++i) {
          const Real* src = g.data.data() + static_cast<size_t>(n.idx[i]) * c;
          Real* dst = dx.data.data() + i * c;
          for (size_t j = 0; j < c; ++j) dst[j] += src[j];
        }
        break;
      }
      case Op::MeanOverAxes: {
        auto& dx = grad_buf(n.in[0]);
        const auto& xs = dx.shape;
        const auto ostride = reduced_strides(xs, n.axes);
        size_t count = 1;
        for (size_t ax : n.axes) count *= xs[ax];
        const Real inv = static_cast<Real>(1.0 / static_cast<double>(count));
        std::vector<size_t> ix(xs.size(), 0);
        for (size_t flat = 0; flat < dx.numel(); ++flat) {
          size_t o = 0;
          for (size_t d = 0; d < xs.size(); ++d) o += ix[d] * ostride[d];
          dx.data[flat] += g.data[o] * inv;
          for (size_t d = xs.size(); d-- > 0;) {
            if (++ix[d] < xs[d]) break;
            ix[d] = 0;
          }
        }
        break;
      }
      case Op::Reshape: {
        auto& dx = grad_buf(n.in[0]);
        for (size_t i = 0; i < g.numel(); ++i) dx.data[i] += g.data[i];
        break;
      }
      case Op::SoftmaxCE: {
        auto& dl = grad_buf(n.in[0]);
        const size_t b = dl.shape[0];
        const size_t c = dl.shape[1];
        const Real go = g.data[0] / static_cast<Real>(b);
        for (size_t r = 0; r < b; ++r) {
          Real* dr = dl.data.data() + r * c;
          const Real* pr = n.saved.data.data() + r * c;
          for (size_t j = 0; j < c; ++j) dr[j] += go * pr[j];
          dr[static_cast<size_t>(n.labels[r])] -= go;
        }
        break;
      }
    }
  }

  void backprop_layer_norm(Node& n, const Tensor<Real>& g) {
    const auto& x = nodes_[n.in[0]].value;
    const auto& gamma = nodes_[n.in[1]].value;
    const size_t c = x.shape.back();
    const size_t rows = x.numel() / c;
    Tensor<Real>* dx = wants_grad(n.in[0]) ? &grad_buf(n.in[0]) : nullptr;
    Tensor<Real>* dgamma = wants_grad(n.in[1]) ? &grad_buf(n.in[1]) : nullptr;
    Tensor<Real>* dbeta = wants_grad(n.in[2]) ? &grad_buf(n.in[2]) : nullptr;
    for (size_t r = 0; r < rows; ++r) {
      const Real* xr = x.data.data() + r * c;
      const Real* gr = g.data.data() + r * c;
      const double mean = n.saved.at(r, 0);
      const double inv = n.saved.at(r, 1);
      double sum_dxh = 0, sum_dxh_xh = 0;
      for (size_t j = 0; j < c; ++j) {
        const double xh = (xr[j] - mean) * inv;
        const double dxh = static_cast<double>(gr[j]) * gamma.data[j];
        sum_dxh += dxh;
        sum_dxh_xh += dxh * xh;
        if (dgamma) dgamma->data[j] += static_cast<Real>(gr[j] * xh);
        if (dbeta) dbeta->data[j] += gr[j];
      }
      if (dx) {
        const double ic = 1.0 / static_cast<double>(c);
        Real* dxr = dx->data.data() + r * c;
        for (size_t j = 0; j < c; ++j) {
          const double xh = (xr[j] - mean) * inv;
          const double dxh = static_cast<double>(gr[j]) * gamma.data[j];
          dxr[j] += static_cast<Real>(inv * (dxh - ic * sum_dxh - xh * ic * sum_dxh_xh));
        }
      }
    }
  }

  void backprop_conv(Node& n, const Tensor<Real>& g) {
    const auto& x = nodes_[n.in[0]].value;
    const auto& w = nodes_[n.in[1]].value;
    const size_t r = x.rank();
    const size_t t_len = x.shape[r - 3];
    const size_t n_pos = x.shape[r - 2];
    const size_t cin = x.shape[r - 1];
    const size_t cout = w.shape[0];
    const size_t kk = w.shape[2];
    const size_t lead = x.numel() / (t_len * n_pos * cin);
    const int pad = static_cast<int>(kk - 1) / 2;

    std::vector<Real> wk(kk * cin * cout);
    for (size_t co = 0; co < cout; ++co)
      for (size_t ci = 0; ci < cin; ++ci)
        for (size_t k = 0; k < kk; ++k)
          wk[(k * cin + ci) * cout + co] = w.data[(co * cin + ci) * kk + k];

    if (wants_grad(n.in[0])) {
      auto& dx = grad_buf(n.in[0]);
#pragma omp parallel for schedule(static)
      for (int64_t l = 0; l < static_cast<int64_t>(lead); ++l) {
        Real* dxl = dx.data.data() + static_cast<size_t>(l) * t_len * n_pos * cin;
        const Real* gl = g.data.data() + static_cast<size_t>(l) * t_len * n_pos * cout;
        for (int dt = -pad; dt <= pad; ++dt) {
          const size_t t0 = static_cast<size_t>(std::max(0, -dt));
          const int64_t t1s = static_cast<int64_t>(t_len) - 1 - std::max(0, dt);
          if (t1s < static_cast<int64_t>(t0)) continue;
          const size_t rows = (static_cast<size_t>(t1s) - t0 + 1) * n_pos;
          // dX[t+dt] += dY[t] * Wk^T
          gemm_bt_accum(rows, cout, cin, gl + t0 * n_pos * cout,
                        wk.data() + static_cast<size_t>(dt + pad) * cin * cout,
                        dxl + (t0 + dt) * n_pos * cin);
        }
      }
    }
    if (wants_grad(n.in[1])) {
      auto& dw = grad_buf(n.in[1]);
      std::vector<Real> dwk(kk * cin * cout, Real(0));
      for (size_t l = 0; l < lead; ++l) {
        const Real* xl = x.data.data() + l * t_len * n_pos * cin;
        const Real* gl = g.data.data() + l * t_len * n_pos * cout;
        for (int dt = -pad; dt <= pad; ++dt) {
          const size_t t0 = static_cast<size_t>(std::max(0, -dt));
          const int64_t t1s = static_cast<int64_t>(t_len) - 1 - std::max(0, dt);
          if (t1s < static_cast<int64_t>(t0)) continue;
          const size_t rows = (static_cast<size_t>(t1s) - t0 + 1) * n_pos;
          // dWk += X[t+dt]^T * dY[t]
          gemm_at_accum(cin, rows, cout, xl + (t0 + dt) * n_pos * cin,
                        gl + t0 * n_pos * cout,
                        dwk.data() + static_cast<size_t>(dt + pad) * cin * cout);
        }
      }
      for (size_t co = 0; co < cout; ++co)
        for (size_t ci = 0; ci < cin; ++ci)
          for (size_t k = 0; k < kk; ++k)
            dw.data[(co * cin + ci) * kk + k] += dwk[(k * cin + ci) * cout + co];
    }
  }

  std::vector<Node> nodes_;
  std::vector<Tensor<Real>> grads_;
  std::string context_;
};

using TapeF = Tape<float>;
using TapeD = Tape<double>;

}  // namespace geomsign
