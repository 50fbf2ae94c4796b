#include "geomsign/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace geomsign {

namespace {
// 75-landmark layout: [0,33) MediaPipe-style body pose, [33,54) left hand,
// [54,75) right hand.
constexpr int kLeftHandBase = 33;
constexpr int kRightHandBase = 54;

// within a 21-point hand: wrist, thumb tip, then (base, tip) per finger
constexpr int kHandPicks[10] = {0, 4, 5, 8, 9, 12, 13, 16, 17, 20};
const char* const kHandPickNames[10] = {"wrist",       "thumb_tip",  "index_base", "index_tip",
                                        "middle_base", "middle_tip", "ring_base",  "ring_tip",
                                        "pinky_base",  "pinky_tip"};
}  // namespace

NodeMap default_node_map() {
  NodeMap m;
  const int body[7] = {0, 11, 12, 13, 14, 15, 16};
  const char* const body_names[7] = {"nose",       "left_shoulder", "right_shoulder",
                                     "left_elbow", "right_elbow",   "left_wrist",
                                     "right_wrist"};
  for (int i = 0; i < 7; ++i) {
    m.indices[i] = body[i];
    m.names[i] = body_names[i];
  }
  for (int i = 0; i < 10; ++i) {
    m.indices[7 + i] = kLeftHandBase + kHandPicks[i];
    m.names[7 + i] = std::string("left_hand_") + kHandPickNames[i];
    m.indices[17 + i] = kRightHandBase + kHandPicks[i];
    m.names[17 + i] = std::string("right_hand_") + kHandPickNames[i];
  }
  return m;
}

SkeletonEdges default_edges() {
  // node indices into the 27-node map produced above:
  // 0 nose, 1 l_shoulder, 2 r_shoulder, 3 l_elbow, 4 r_elbow,
  // 5 l_wrist, 6 r_wrist, 7..16 left hand, 17..26 right hand
  SkeletonEdges e;
  e.edges = {
      {0, 1},  {0, 2},            // shoulder bridge via the nose
      {1, 3},  {3, 5},            // left arm chain
      {2, 4},  {4, 6},            // right arm chain
      {5, 7},  {6, 17},           // body wrist -> hand wrist
      {7, 8},                     // left hand wrist -> thumb tip
      {7, 9},  {9, 10},           // index base/tip
      {7, 11}, {11, 12},          // middle
      {7, 13}, {13, 14},          // ring
      {7, 15}, {15, 16},          // pinky
      {17, 18},                   // right hand wrist -> thumb tip
      {17, 19}, {19, 20},
      {17, 21}, {21, 22},
      {17, 23}, {23, 24},
      {17, 25}, {25, 26},
  };
  e.self_loops = false;
  return e;
}

ReducedGraphSequence reduce(const PoseSequence& seq, const NodeMap& map,
                            const SkeletonEdges& edges) {
  ReducedGraphSequence out;
  out.node_map = map;
  out.edges = edges;
  out.signer = seq.signer;
  out.view = seq.view;
  out.gloss_id = seq.gloss_id;
  const size_t t = seq.frame_count();
  out.frames.resize(t * kGraphNodes * 3);
  for (size_t f = 0; f < t; ++f)
    for (size_t k = 0; k < kGraphNodes; ++k)
      for (size_t c = 0; c < 3; ++c)
        out.frames[(f * kGraphNodes + k) * 3 + c] =
            seq.at(f, static_cast<size_t>(map.indices[k]), c);
  return out;
}

std::vector<double> normalized_adjacency(const SkeletonEdges& edges, bool self_loops, int n) {
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  for (const auto& [i, j] : edges.edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("normalized_adjacency: edge index out of range");
    a[static_cast<size_t>(i) * n + j] = 1.0;
    a[static_cast<size_t>(j) * n + i] = 1.0;
  }
  if (self_loops)
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] = 1.0;
  std::vector<double> dinv(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0;
    for (int j = 0; j < n; ++j) deg += a[static_cast<size_t>(i) * n + j];
    dinv[i] = deg > 0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] *= dinv[i] * dinv[j];
  return a;
}

std::string graph_to_json(const NodeMap& map, const SkeletonEdges& edges) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (size_t i = 0; i < kGraphNodes; ++i)
    j["nodes"].push_back({{"node", i}, {"landmark", map.indices[i]}, {"name", map.names[i]}});
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : edges.edges) j["edges"].push_back({a, b});
  j["self_loops"] = edges.self_loops;
  return j.dump(2);
}

}  // namespace geomsign
