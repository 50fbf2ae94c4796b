#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "geomsign/types.hpp"

namespace geomsign {

constexpr size_t kGraphNodes = 27;

// Selection of 27 source landmarks: 7 body (nose, shoulders, elbows,
// wrists) + 10 per hand (wrist, thumb tip, base and tip of index, middle,
// ring, pinky).
struct NodeMap {
  std::array<int, kGraphNodes> indices{};
  std::array<std::string, kGraphNodes> names{};
};

// 26 undirected bone-like edges forming a spanning tree of the 27 nodes.
struct SkeletonEdges {
  std::vector<std::pair<int, int>> edges;
  bool self_loops = false;
};

NodeMap default_node_map();
SkeletonEdges default_edges();

struct ReducedGraphSequence {
  std::vector<float> frames;  // T * 27 * 3
  NodeMap node_map;
  SkeletonEdges edges;
  SignerTag signer = SignerTag::S1;
  View view = View::Front;
  int gloss_id = 0;

  size_t frame_count() const { return frames.size() / (kGraphNodes * 3); }
  float at(size_t t, size_t node, size_t c) const {
    return frames[(t * kGraphNodes + node) * 3 + c];
  }
};

// Gathers the mapped landmarks per frame; coordinates are copied untouched.
ReducedGraphSequence reduce(const PoseSequence& seq, const NodeMap& map,
                            const SkeletonEdges& edges);

// D^(-1/2) (A [+ I]) D^(-1/2) as a dense row-major n x n matrix. Isolated
// nodes (degree 0 without self loops) keep zero rows.
std::vector<double> normalized_adjacency(const SkeletonEdges& edges, bool self_loops,
                                         int n = kGraphNodes);

// JSON dump of the node map and edge list (for `geomsign graph --dump-map`).
std::string graph_to_json(const NodeMap& map, const SkeletonEdges& edges);

}  // namespace geomsign
