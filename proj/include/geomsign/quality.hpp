#pragma once

#include <map>
#include <string>

#include "geomsign/types.hpp"

namespace geomsign {

// Fraction of (frame, landmark) cells that are not the exact failure triple
// (0,0,0). Invariant to frame order.
double keypoint_success_ratio(const PoseSequence& seq);

// Ratio of successful to failed extractions per sign and over the dataset,
// with human/synthetic and per-view groupings. dataset_success is the
// cell-weighted mean of the per-sign ratios.
struct QualityReport {
  std::map<int, double> per_sign_success;
  std::map<int, long long> failed_counts;
  double dataset_success = 0.0;
  std::map<std::string, double> group_success;          // "human", "synthetic"
  std::map<int, std::map<char, double>> per_sign_view;  // gloss -> view code -> ratio
};

// base_dir resolves entry paths (usually the manifest's directory). Load
// failures propagate with the offending path; an empty manifest is an error.
QualityReport dataset_quality(const DatasetManifest& manifest, const std::string& base_dir);

struct StatsReport {
  std::map<SignerTag, int> clips_per_signer;
  std::map<View, int> clips_per_view;
  std::map<Handedness, int> handedness_counts;
  std::map<std::string, int> strong_handshape_counts;
  std::map<std::string, int> weak_handshape_counts;
};

StatsReport dataset_stats(const DatasetManifest& manifest);

// Uniform index resampling to a fixed length: output frame i copies input
// frame floor(i*T_c/T_target). Nearest-prior copying, no interpolation, so
// failed (zero) keypoints are never blended into fabricated positions.
PoseSequence resample_time(const PoseSequence& seq, size_t t_target);

}  // namespace geomsign
