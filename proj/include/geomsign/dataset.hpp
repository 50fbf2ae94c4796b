#pragma once

#include <map>
#include <string>
#include <vector>

#include "geomsign/graph.hpp"
#include "geomsign/tensor.hpp"
#include "geomsign/types.hpp"

namespace geomsign {

// One clip prepared for the model: reduced to the 27-node graph and
// resampled to a fixed temporal length.
struct LoadedClip {
  std::string clip_id;
  SignerTag signer = SignerTag::S1;
  View view = View::Front;
  int gloss_id = 0;
  int label = 0;                // dense class index (vocabulary order)
  Tensor<float> positions;      // T x 27 x 2 (image x, y)
  Tensor<float> depth;          // T x 27 (camera depth channel)
};

// Loads clips lazily by identifier and caches them. Labels are the rank of
// the gloss id within the sorted vocabulary.
class ClipStore {
 public:
  ClipStore(DatasetManifest manifest, std::string base_dir, size_t t_frames);

  const LoadedClip& get(const std::string& clip_id);
  int label_of_gloss(int gloss_id) const;
  size_t num_classes() const { return label_of_.size(); }
  size_t t_frames() const { return t_frames_; }
  const DatasetManifest& manifest() const { return manifest_; }

 private:
  DatasetManifest manifest_;
  std::string base_dir_;
  size_t t_frames_;
  NodeMap node_map_;
  SkeletonEdges edges_;
  std::map<std::string, const ManifestEntry*> by_id_;
  std::map<int, int> label_of_;
  std::map<std::string, LoadedClip> cache_;
};

// Stacked model inputs for a list of clips.
struct Batch {
  Tensor<float> positions;  // B x T x 27 x 2
  Tensor<float> depth;      // B x T x 27
  std::vector<int> labels;
};

Batch make_batch(ClipStore& store, const std::vector<std::string>& clip_ids);

}  // namespace geomsign
