#include "geomsign/model.hpp"

#include <cmath>
#include <stdexcept>

#include "geomsign/errors.hpp"
#include "json.hpp"

namespace geomsign {

using nlohmann::json;

const char* to_string(Variant v) { return v == Variant::Invariant ? "invariant" : "baseline"; }

const char* to_string(InputFeatureMode m) {
  return m == InputFeatureMode::NodeIdOnly ? "node_id_only" : "node_id_plus_depth";
}

void validate_config(const ModelConfig& cfg) {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw std::invalid_argument(std::string("model config: ") + what + " must be > 0");
  };
  positive(cfg.hidden_dim, "hidden_dim");
  positive(cfg.num_layers, "num_layers");
  positive(cfg.temporal_kernel, "temporal_kernel");
  positive(cfg.basis_dim, "basis_dim");
  positive(cfg.widening_factor, "widening_factor");
  positive(cfg.num_orientations, "num_orientations");
  positive(cfg.num_classes, "num_classes");
  positive(cfg.num_nodes, "num_nodes");
  if (cfg.temporal_kernel % 2 == 0)
    throw std::invalid_argument("model config: temporal_kernel must be odd");
  if (cfg.poly_degree != 1)
    throw std::invalid_argument("model config: only degree-1 polynomial embedding is supported");
  if (cfg.variant == Variant::Baseline && cfg.num_orientations != 1)
    throw std::invalid_argument("model config: the baseline variant is defined at one orientation");
  if (cfg.layer_scale < 0) throw std::invalid_argument("model config: layer_scale must be >= 0");
}

int attribute_dim(const ModelConfig& cfg) {
  if (cfg.num_orientations > 1) return 3;
  return cfg.variant == Variant::Baseline ? 2 : 1;
}

std::string model_config_to_json(const ModelConfig& cfg) {
  json j{{"hidden_dim", cfg.hidden_dim},
         {"num_layers", cfg.num_layers},
         {"temporal_kernel", cfg.temporal_kernel},
         {"basis_dim", cfg.basis_dim},
         {"poly_degree", cfg.poly_degree},
         {"widening_factor", cfg.widening_factor},
         {"layer_scale", cfg.layer_scale},
         {"num_orientations", cfg.num_orientations},
         {"num_classes", cfg.num_classes},
         {"num_nodes", cfg.num_nodes},
         {"input_feature_mode", to_string(cfg.input_feature_mode)},
         {"variant", to_string(cfg.variant)}};
  return j.dump(2);
}

ModelConfig model_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model config is not valid JSON: ") + e.what());
  }
  ModelConfig cfg;
  try {
    cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
    cfg.num_layers = j.value("num_layers", cfg.num_layers);
    cfg.temporal_kernel = j.value("temporal_kernel", cfg.temporal_kernel);
    cfg.basis_dim = j.value("basis_dim", cfg.basis_dim);
    cfg.poly_degree = j.value("poly_degree", cfg.poly_degree);
    cfg.widening_factor = j.value("widening_factor", cfg.widening_factor);
    cfg.layer_scale = j.value("layer_scale", cfg.layer_scale);
    cfg.num_orientations = j.value("num_orientations", cfg.num_orientations);
    cfg.num_classes = j.value("num_classes", cfg.num_classes);
    cfg.num_nodes = j.value("num_nodes", cfg.num_nodes);
    if (j.contains("input_feature_mode")) {
      const auto s = j["input_feature_mode"].get<std::string>();
      if (s == to_string(InputFeatureMode::NodeIdOnly))
        cfg.input_feature_mode = InputFeatureMode::NodeIdOnly;
      else if (s == to_string(InputFeatureMode::NodeIdPlusDepth))
        cfg.input_feature_mode = InputFeatureMode::NodeIdPlusDepth;
      else
        throw FormatError("model config: unknown input_feature_mode '" + s + "'");
    }
    if (j.contains("variant")) {
      const auto s = j["variant"].get<std::string>();
      if (s == "invariant")
        cfg.variant = Variant::Invariant;
      else if (s == "baseline")
        cfg.variant = Variant::Baseline;
      else
        throw FormatError("model config: unknown variant '" + s + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("model config: mistyped field: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::vector<ParamSpec> param_specs(const ModelConfig& cfg) {
  validate_config(cfg);
  const size_t h = static_cast<size_t>(cfg.hidden_dim);
  const size_t wh = h * static_cast<size_t>(cfg.widening_factor);
  const size_t k = static_cast<size_t>(cfg.temporal_kernel);
  const size_t fin = static_cast<size_t>(cfg.num_nodes) +
                     (cfg.input_feature_mode == InputFeatureMode::NodeIdPlusDepth ? 1 : 0);
  const size_t a1 = static_cast<size_t>(attribute_dim(cfg)) + 1;
  const size_t bd = static_cast<size_t>(cfg.basis_dim);

  std::vector<ParamSpec> specs;
  auto normal = [&](std::string name, std::vector<size_t> shape, double std, bool decay = false) {
    specs.push_back({std::move(name), std::move(shape), ParamSpec::Init::Normal, std, decay});
  };
  auto zeros = [&](std::string name, std::vector<size_t> shape) {
    specs.push_back({std::move(name), std::move(shape), ParamSpec::Init::Zeros, 0.0, false});
  };

  normal("embed.w", {fin, h}, 1.0);
  zeros("embed.b", {h});
  // the degree-1 basis sees attributes of image scale (<~1); a wide init
  // spreads the GeLU basis over that range
  normal("basis.w", {a1, bd}, 2.0);
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    normal(p + "kernel.w", {bd, h}, std::sqrt(1.0 / static_cast<double>(bd)));
    specs.push_back({p + "ln.gamma", {h}, ParamSpec::Init::Ones, 1.0, false});
    zeros(p + "ln.beta", {h});
    normal(p + "pw1.w", {h, wh}, std::sqrt(2.0 / static_cast<double>(h)));
    zeros(p + "pw1.b", {wh});
    normal(p + "pw2.w", {wh, h}, std::sqrt(2.0 / static_cast<double>(wh)));
    zeros(p + "pw2.b", {h});
    if (cfg.layer_scale > 0) {
      specs.push_back({p + "ls.spatial", {h}, ParamSpec::Init::Const, cfg.layer_scale, false});
    }
    normal(p + "tconv1.w", {h, h, k}, std::sqrt(2.0 / static_cast<double>(h * k)), true);
    normal(p + "tconv2.w", {h, h, k}, std::sqrt(2.0 / static_cast<double>(h * k)), true);
    if (cfg.layer_scale > 0) {
      specs.push_back({p + "ls.temporal", {h}, ParamSpec::Init::Const, cfg.layer_scale, false});
    }
  }
  normal("head.w", {h, static_cast<size_t>(cfg.num_classes)},
         std::sqrt(1.0 / static_cast<double>(h)));
  zeros("head.b", {static_cast<size_t>(cfg.num_classes)});
  return specs;
}

size_t parameter_count(const ModelConfig& cfg) {
  size_t n = 0;
  for (const auto& s : param_specs(cfg)) n += Tensor<float>::count(s.shape);
  return n;
}

ParamLayout param_layout(const ModelConfig& cfg) {
  ParamLayout lay;
  int i = 0;
  lay.embed_w = i++;
  lay.embed_b = i++;
  lay.basis_w = i++;
  for (int l = 0; l < cfg.num_layers; ++l) {
    ParamLayout::Layer lp;
    lp.kernel_w = i++;
    lp.ln_gamma = i++;
    lp.ln_beta = i++;
    lp.pw1_w = i++;
    lp.pw1_b = i++;
    lp.pw2_w = i++;
    lp.pw2_b = i++;
    if (cfg.layer_scale > 0) lp.ls_spatial = i++;
    lp.tconv1_w = i++;
    lp.tconv2_w = i++;
    if (cfg.layer_scale > 0) lp.ls_temporal = i++;
    lay.layers.push_back(lp);
  }
  lay.head_w = i++;
  lay.head_b = i++;
  return lay;
}

MessageStructure build_message_structure(const SkeletonEdges& edges, int num_nodes,
                                         int num_orientations) {
  if (num_orientations < 1)
    throw std::invalid_argument("build_message_structure: need at least one orientation");
  const int m = num_orientations;
  MessageStructure ms;
  ms.num_orientations = m;
  ms.points_per_frame = num_nodes * m;

  // directed skeleton pairs incl. self loops, receiver <- sender
  std::vector<std::pair<int, int>> directed;  // (receiver, sender)
  for (const auto& [a, b] : edges.edges) {
    directed.emplace_back(a, b);
    directed.emplace_back(b, a);
  }
  for (int i = 0; i < num_nodes; ++i) directed.emplace_back(i, i);

  const double bin = 6.283185307179586476925286766559 / static_cast<double>(m);
  for (const auto& [recv, send] : directed) {
    for (int mr = 0; mr < m; ++mr) {
      for (int msend = 0; msend < m; ++msend) {
        ms.receiver_point.push_back(recv * m + mr);
        ms.sender_point.push_back(send * m + msend);
        ms.receiver_node.push_back(recv);
        ms.sender_node.push_back(send);
        ms.receiver_theta.push_back(bin * mr);
        double rel = bin * (msend - mr);
        while (rel < 0) rel += 6.283185307179586476925286766559;
        ms.rel_angle.push_back(rel);
      }
    }
  }
  return ms;
}

}  // namespace geomsign
