#include "geomsign/quality.hpp"

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "geomsign/errors.hpp"
#include "geomsign/pose_io.hpp"

namespace geomsign {

namespace {
long long count_failed_cells(const PoseSequence& seq) {
  const size_t t = seq.frame_count();
  long long failed = 0;
  for (size_t f = 0; f < t; ++f)
    for (size_t lm = 0; lm < PoseSequence::kLandmarks; ++lm)
      if (seq.at(f, lm, 0) == 0.0f && seq.at(f, lm, 1) == 0.0f && seq.at(f, lm, 2) == 0.0f)
        ++failed;
  return failed;
}
}  // namespace

double keypoint_success_ratio(const PoseSequence& seq) {
  const long long cells =
      static_cast<long long>(seq.frame_count()) * PoseSequence::kLandmarks;
  return 1.0 - static_cast<double>(count_failed_cells(seq)) / static_cast<double>(cells);
}

QualityReport dataset_quality(const DatasetManifest& manifest, const std::string& base_dir) {
  if (manifest.entries.empty()) throw ValidationError("dataset_quality: no clips in manifest");

  struct Tally {
    long long cells = 0;
    long long failed = 0;
  };
  std::map<int, Tally> per_sign;
  std::map<std::string, Tally> per_group;
  std::map<int, std::map<char, Tally>> per_sign_view;
  Tally total;

  // deterministic aggregation order regardless of manifest order
  std::vector<const ManifestEntry*> order;
  for (const auto& e : manifest.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const ManifestEntry* a, const ManifestEntry* b) { return a->clip_id < b->clip_id; });

  for (const ManifestEntry* e : order) {
    const auto path = (std::filesystem::path(base_dir) / e->path).string();
    PoseSequence seq;
    try {
      seq = load_pose_file(path);
    } catch (const std::exception& ex) {
      throw IoError("dataset_quality: while loading clip " + e->clip_id + ": " + ex.what());
    }
    const long long cells =
        static_cast<long long>(seq.frame_count()) * PoseSequence::kLandmarks;
    const long long failed = count_failed_cells(seq);
    auto& s = per_sign[e->gloss_id];
    s.cells += cells;
    s.failed += failed;
    auto& grp = per_group[e->signer == SignerTag::A ? "synthetic" : "human"];
    grp.cells += cells;
    grp.failed += failed;
    auto& pv = per_sign_view[e->gloss_id][view_code(e->view)];
    pv.cells += cells;
    pv.failed += failed;
    total.cells += cells;
    total.failed += failed;
  }

  QualityReport report;
  auto ratio_of = [](const Tally& t) {
    return 1.0 - static_cast<double>(t.failed) / static_cast<double>(t.cells);
  };
  for (const auto& [gloss, t] : per_sign) {
    report.per_sign_success[gloss] = ratio_of(t);
    report.failed_counts[gloss] = t.failed;
  }
  for (const auto& [name, t] : per_group) report.group_success[name] = ratio_of(t);
  for (const auto& [gloss, views] : per_sign_view)
    for (const auto& [code, t] : views) report.per_sign_view[gloss][code] = ratio_of(t);
  report.dataset_success = ratio_of(total);
  return report;
}

StatsReport dataset_stats(const DatasetManifest& manifest) {
  StatsReport s;
  for (const auto& e : manifest.entries) {
    s.clips_per_signer[e.signer] += 1;
    s.clips_per_view[e.view] += 1;
  }
  for (const auto& g : manifest.vocabulary) {
    s.handedness_counts[g.handedness] += 1;
    s.strong_handshape_counts[g.strong_handshape] += 1;
    if (g.weak_handshape) s.weak_handshape_counts[*g.weak_handshape] += 1;
  }
  return s;
}

PoseSequence resample_time(const PoseSequence& seq, size_t t_target) {
  if (t_target == 0) throw std::invalid_argument("resample_time: T_target must be >= 1");
  const size_t t_c = seq.frame_count();
  PoseSequence out;
  out.signer = seq.signer;
  out.view = seq.view;
  out.gloss_id = seq.gloss_id;
  out.fps = seq.fps;
  const size_t row = PoseSequence::kLandmarks * PoseSequence::kChannels;
  out.frames.resize(t_target * row);
  for (size_t i = 0; i < t_target; ++i) {
    const size_t src = i * t_c / t_target;  // floor(i*T_c/T_target)
    std::copy_n(seq.frames.data() + src * row, row, out.frames.data() + i * row);
  }
  return out;
}

}  // namespace geomsign
