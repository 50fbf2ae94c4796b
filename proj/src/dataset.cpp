#include "geomsign/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "geomsign/errors.hpp"
#include "geomsign/pose_io.hpp"
#include "geomsign/quality.hpp"

namespace geomsign {

ClipStore::ClipStore(DatasetManifest manifest, std::string base_dir, size_t t_frames)
    : manifest_(std::move(manifest)), base_dir_(std::move(base_dir)), t_frames_(t_frames) {
  if (t_frames_ == 0) throw std::invalid_argument("ClipStore: t_frames must be >= 1");
  node_map_ = default_node_map();
  edges_ = default_edges();
  for (const auto& e : manifest_.entries) by_id_[e.clip_id] = &e;
  std::vector<int> glosses;
  for (const auto& g : manifest_.vocabulary) glosses.push_back(g.gloss_id);
  std::sort(glosses.begin(), glosses.end());
  for (size_t i = 0; i < glosses.size(); ++i) label_of_[glosses[i]] = static_cast<int>(i);
}

int ClipStore::label_of_gloss(int gloss_id) const {
  const auto it = label_of_.find(gloss_id);
  if (it == label_of_.end())
    throw ValidationError("unknown gloss id " + std::to_string(gloss_id));
  return it->second;
}

const LoadedClip& ClipStore::get(const std::string& clip_id) {
  if (const auto it = cache_.find(clip_id); it != cache_.end()) return it->second;
  const auto entry_it = by_id_.find(clip_id);
  if (entry_it == by_id_.end())
    throw ValidationError("clip '" + clip_id + "' is not in the manifest");
  const ManifestEntry& e = *entry_it->second;

  PoseSequence seq =
      load_pose_file((std::filesystem::path(base_dir_) / e.path).string());
  seq.signer = e.signer;
  seq.view = e.view;
  seq.gloss_id = e.gloss_id;
  const ReducedGraphSequence red = reduce(resample_time(seq, t_frames_), node_map_, edges_);

  LoadedClip clip;
  clip.clip_id = clip_id;
  clip.signer = e.signer;
  clip.view = e.view;
  clip.gloss_id = e.gloss_id;
  clip.label = label_of_gloss(e.gloss_id);
  clip.positions = Tensor<float>({t_frames_, kGraphNodes, 2});
  clip.depth = Tensor<float>({t_frames_, kGraphNodes});
  for (size_t t = 0; t < t_frames_; ++t)
    for (size_t n = 0; n < kGraphNodes; ++n) {
      clip.positions.at(t, n, 0) = red.at(t, n, 0);
      clip.positions.at(t, n, 1) = red.at(t, n, 1);
      clip.depth.at(t, n) = red.at(t, n, 2);
    }
  return cache_.emplace(clip_id, std::move(clip)).first->second;
}

Batch make_batch(ClipStore& store, const std::vector<std::string>& clip_ids) {
  if (clip_ids.empty()) throw std::invalid_argument("make_batch: no clips");
  const size_t b = clip_ids.size();
  const size_t t = store.t_frames();
  Batch batch;
  batch.positions = Tensor<float>({b, t, kGraphNodes, 2});
  batch.depth = Tensor<float>({b, t, kGraphNodes});
  batch.labels.resize(b);
  for (size_t i = 0; i < b; ++i) {
    const LoadedClip& clip = store.get(clip_ids[i]);
    std::copy(clip.positions.data.begin(), clip.positions.data.end(),
              batch.positions.data.begin() + i * t * kGraphNodes * 2);
    std::copy(clip.depth.data.begin(), clip.depth.data.end(),
              batch.depth.data.begin() + i * t * kGraphNodes);
    batch.labels[i] = clip.label;
  }
  return batch;
}

}  // namespace geomsign
