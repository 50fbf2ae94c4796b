#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "geomsign/graph.hpp"
#include "geomsign/rng.hpp"
#include "geomsign/tape.hpp"
#include "geomsign/tensor.hpp"

namespace geomsign {

enum class Variant : uint8_t { Invariant, Baseline };
enum class InputFeatureMode : uint8_t { NodeIdOnly, NodeIdPlusDepth };

const char* to_string(Variant v);
const char* to_string(InputFeatureMode m);

// Hyperparameters of the classifier. Defaults follow the trained
// configuration: hidden 64, 6 layers, temporal kernel 9, basis 128,
// degree-1 polynomial attribute embedding, widening factor 4, layer scale
// disabled, one orientation, 200 classes.
struct ModelConfig {
  int hidden_dim = 64;
  int num_layers = 6;
  int temporal_kernel = 9;
  int basis_dim = 128;
  int poly_degree = 1;
  int widening_factor = 4;
  double layer_scale = 0.0;  // 0 disables the learnable residual scaling
  int num_orientations = 1;
  int num_classes = 200;
  int num_nodes = 27;
  InputFeatureMode input_feature_mode = InputFeatureMode::NodeIdOnly;
  Variant variant = Variant::Invariant;
};

// throws std::invalid_argument on inconsistent settings
void validate_config(const ModelConfig& cfg);

std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

// Pairwise attribute width: 1 for the invariant distance, 2 for the
// baseline's raw displacement, 3 on the orientation grid
// (parallel, perpendicular, relative angle).
int attribute_dim(const ModelConfig& cfg);

// ---- parameters -----------------------------------------------------------

struct ParamSpec {
  enum class Init : uint8_t { Normal, Zeros, Ones, Const };
  std::string name;
  std::vector<size_t> shape;
  Init init = Init::Normal;
  double scale = 1.0;          // stddev for Normal, value for Const
  bool temporal_decay = false; // member of the weight-decay set
};

// Canonical ordered parameter listing; forward() consumes leaves in this
// exact order, checkpoints store them under these names.
std::vector<ParamSpec> param_specs(const ModelConfig& cfg);
size_t parameter_count(const ModelConfig& cfg);

template <typename Real>
std::vector<Tensor<Real>> init_params(const ModelConfig& cfg, uint64_t seed) {
  std::vector<Tensor<Real>> out;
  const Rng root(seed);
  for (const auto& spec : param_specs(cfg)) {
    Rng stream = root.fork(spec.name);
    switch (spec.init) {
      case ParamSpec::Init::Normal:
        out.push_back(Tensor<Real>::randn(spec.shape, stream, spec.scale));
        break;
      case ParamSpec::Init::Zeros:
        out.push_back(Tensor<Real>::zeros(spec.shape));
        break;
      case ParamSpec::Init::Ones:
        out.push_back(Tensor<Real>::full(spec.shape, Real(1)));
        break;
      case ParamSpec::Init::Const:
        out.push_back(Tensor<Real>::full(spec.shape, static_cast<Real>(spec.scale)));
        break;
    }
  }
  return out;
}

// ---- graph expansion ---------------------------------------------------------

// Directed message structure over the skeleton, expanded over the
// orientation grid when M > 1. Receivers aggregate over senders; self pairs
// are always present. For M > 1 every (receiver bin, sender bin) pair of
// every directed edge becomes one fiber edge.
struct MessageStructure {
  int num_orientations = 1;
  int points_per_frame = 27;  // num_nodes * M
  std::vector<int> sender_point;    // fiber point index within a frame
  std::vector<int> receiver_point;
  std::vector<int> sender_node;     // underlying skeleton node
  std::vector<int> receiver_node;
  std::vector<double> receiver_theta;  // orientation of the receiving bin
  std::vector<double> rel_angle;       // wrapped sender-minus-receiver angle

  size_t edges_per_frame() const { return sender_point.size(); }
};

MessageStructure build_message_structure(const SkeletonEdges& edges, int num_nodes,
                                         int num_orientations);

// ---- attributes ----------------------------------------------------------------

// positions: B x T x N x 2 (image x, y). Returns (B*T*E) x A where E is the
// per-frame fiber edge count. Invariant: distance; baseline: displacement
// receiver->sender; orientation grid: displacement in the receiver bin's
// frame plus the relative angle.
template <typename Real>
Tensor<Real> pair_attributes(const Tensor<Real>& positions, const MessageStructure& ms,
                             const ModelConfig& cfg) {
  const size_t b = positions.shape[0];
  const size_t t = positions.shape[1];
  const size_t n = positions.shape[2];
  const size_t e = ms.edges_per_frame();
  const int a = attribute_dim(cfg);
  Tensor<Real> out({b * t * e, static_cast<size_t>(a)});
  size_t row = 0;
  for (size_t bi = 0; bi < b; ++bi)
    for (size_t ti = 0; ti < t; ++ti)
      for (size_t ei = 0; ei < e; ++ei, ++row) {
        const size_t ri = static_cast<size_t>(ms.receiver_node[ei]);
        const size_t si = static_cast<size_t>(ms.sender_node[ei]);
        const double dx = static_cast<double>(positions.at(bi, ti, si, 0)) -
                          static_cast<double>(positions.at(bi, ti, ri, 0));
        const double dy = static_cast<double>(positions.at(bi, ti, si, 1)) -
                          static_cast<double>(positions.at(bi, ti, ri, 1));
        Real* o = out.data.data() + row * static_cast<size_t>(a);
        if (cfg.num_orientations > 1) {
          const double th = ms.receiver_theta[ei];
          o[0] = static_cast<Real>(std::cos(th) * dx + std::sin(th) * dy);
          o[1] = static_cast<Real>(-std::sin(th) * dx + std::cos(th) * dy);
          o[2] = static_cast<Real>(ms.rel_angle[ei]);
        } else if (cfg.variant == Variant::Baseline) {
          o[0] = static_cast<Real>(dx);
          o[1] = static_cast<Real>(dy);
        } else {
          o[0] = static_cast<Real>(std::sqrt(dx * dx + dy * dy));
        }
        (void)n;
      }
  return out;
}

// Degree-1 polynomial embedding: attribute components plus a constant 1.
template <typename Real>
Tensor<Real> poly_features(const Tensor<Real>& attrs) {
  const size_t rows = attrs.shape[0];
  const size_t a = attrs.shape[1];
  Tensor<Real> out({rows, a + 1});
  for (size_t r = 0; r < rows; ++r) {
    for (size_t j = 0; j < a; ++j) out.at(r, j) = attrs.at(r, j);
    out.at(r, a) = Real(1);
  }
  return out;
}

// ---- forward -------------------------------------------------------------------

// Indices of the named parameters within the param_specs ordering.
struct ParamLayout {
  int embed_w, embed_b, basis_w;
  struct Layer {
    int kernel_w, ln_gamma, ln_beta, pw1_w, pw1_b, pw2_w, pw2_b, tconv1_w, tconv2_w;
    int ls_spatial = -1, ls_temporal = -1;
  };
  std::vector<Layer> layers;
  int head_w, head_b;
};
ParamLayout param_layout(const ModelConfig& cfg);

// helper for the optional layer-scale path: tiles a length-H vector into
// rows x H so it can gate a residual branch elementwise
template <typename Real>
typename Tape<Real>::Id broadcast_rows(Tape<Real>& tape, typename Tape<Real>::Id vec,
                                       size_t rows) {
  const size_t h = tape.val(vec).shape[0];
  Tensor<Real> ones({rows, 1});
  std::fill(ones.data.begin(), ones.data.end(), Real(1));
  return tape.matmul(tape.leaf(std::move(ones)), tape.reshape(vec, {1, h}));
}

// Full temporal-PONITA pass: one-hot node features (optionally + depth) ->
// linear embed -> num_layers x (spatial ConvNeXt-style message block;
// two-conv temporal block) -> mean pool over time, nodes and orientation
// bins -> linear head. Image positions enter only through pair_attributes.
//
// positions: B x T x N x 2; depth: B x T x N (may be null unless the config
// asks for it). params must follow param_specs order. Returns the logits id
// (B x num_classes) on the tape.
template <typename Real>
typename Tape<Real>::Id ponita_forward(Tape<Real>& tape, const ModelConfig& cfg,
                                       const MessageStructure& ms,
                                       const std::vector<typename Tape<Real>::Id>& params,
                                       const Tensor<Real>& positions,
                                       const Tensor<Real>* depth = nullptr) {
  using Id = typename Tape<Real>::Id;
  validate_config(cfg);
  if (positions.rank() != 4 || positions.shape[2] != static_cast<size_t>(cfg.num_nodes) ||
      positions.shape[3] != 2)
    throw std::invalid_argument("ponita_forward: positions must be B x T x " +
                                std::to_string(cfg.num_nodes) + " x 2, got " +
                                positions.shape_str());
  const bool want_depth = cfg.input_feature_mode == InputFeatureMode::NodeIdPlusDepth;
  if (want_depth && depth == nullptr)
    throw std::invalid_argument("ponita_forward: config wants depth features, none given");

  const size_t b = positions.shape[0];
  const size_t t = positions.shape[1];
  const size_t n = positions.shape[2];
  const size_t m = static_cast<size_t>(ms.num_orientations);
  const size_t pts = static_cast<size_t>(ms.points_per_frame);
  const size_t rows = b * t * pts;
  const size_t h = static_cast<size_t>(cfg.hidden_dim);
  const ParamLayout lay = param_layout(cfg);

  // node-identity features, shared across orientation bins
  const size_t fin = n + (want_depth ? 1 : 0);
  Tensor<Real> feats({rows, fin});
  for (size_t bi = 0; bi < b; ++bi)
    for (size_t ti = 0; ti < t; ++ti)
      for (size_t ni = 0; ni < n; ++ni)
        for (size_t mi = 0; mi < m; ++mi) {
          const size_t r = ((bi * t + ti) * pts) + ni * m + mi;
          feats.at(r, ni) = Real(1);
          if (want_depth) feats.at(r, n) = depth->at(bi, ti, ni);
        }
  Id x = tape.add(tape.matmul(tape.leaf(std::move(feats)), params[lay.embed_w]),
                  params[lay.embed_b]);

  // shared attribute basis
  Id poly = tape.leaf(poly_features(pair_attributes(positions, ms, cfg)));
  Id basis = tape.gelu(tape.matmul(poly, params[lay.basis_w]));

  // batch-expanded gather/scatter indices
  const size_t e = ms.edges_per_frame();
  std::vector<uint32_t> senders(b * t * e), receivers(b * t * e);
  {
    size_t row = 0;
    for (size_t bi = 0; bi < b; ++bi)
      for (size_t ti = 0; ti < t; ++ti) {
        const size_t base = (bi * t + ti) * pts;
        for (size_t ei = 0; ei < e; ++ei, ++row) {
          senders[row] = static_cast<uint32_t>(base + ms.sender_point[ei]);
          receivers[row] = static_cast<uint32_t>(base + ms.receiver_point[ei]);
        }
      }
  }

  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const auto& lp = lay.layers[static_cast<size_t>(layer)];
    // spatial block: depthwise message aggregation, then pointwise MLP
    Id kernels = tape.matmul(basis, params[lp.kernel_w]);
    Id gathered = tape.gather_rows(x, senders);
    Id messages = tape.mul(gathered, kernels);
    Id agg = tape.segment_sum(messages, receivers, rows);
    Id yb = tape.layer_norm(agg, params[lp.ln_gamma], params[lp.ln_beta]);
    yb = tape.add(tape.matmul(yb, params[lp.pw1_w]), params[lp.pw1_b]);
    yb = tape.gelu(yb);
    yb = tape.add(tape.matmul(yb, params[lp.pw2_w]), params[lp.pw2_b]);
    if (lp.ls_spatial >= 0) yb = tape.mul(yb, broadcast_rows(tape, params[lp.ls_spatial], rows));
    x = tape.add(x, yb);

    // temporal block: two time convolutions with GeLU, residual
    Id x4 = tape.reshape(x, {b, t, pts, h});
    Id c1 = tape.gelu(tape.conv1d_time(x4, params[lp.tconv1_w]));
    Id c2 = tape.gelu(tape.conv1d_time(c1, params[lp.tconv2_w]));
    if (lp.ls_temporal >= 0)
      c2 = tape.reshape(
          tape.mul(tape.reshape(c2, {rows, h}), broadcast_rows(tape, params[lp.ls_temporal], rows)),
          {b, t, pts, h});
    Id x4r = tape.add(x4, c2);
    x = tape.reshape(x4r, {rows, h});
  }

  // spatio-temporal (and fiber) mean pooling
  Id pooled = tape.mean_over_axes(tape.reshape(x, {b, t, pts, h}), {1, 2});
  return tape.add(tape.matmul(pooled, params[lay.head_w]), params[lay.head_b]);
}

}  // namespace geomsign
