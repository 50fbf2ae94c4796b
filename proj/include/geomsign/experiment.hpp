#pragma once

#include <string>
#include <vector>

#include "geomsign/dataset.hpp"
#include "geomsign/folds.hpp"
#include "geomsign/metrics.hpp"
#include "geomsign/model.hpp"
#include "geomsign/train.hpp"

namespace geomsign {

enum class Protocol : uint8_t {
  Blocks,       // k-fold cross-validation blocks over the three human signers
  NovelSigner,  // S3 held out entirely
};

struct ExperimentSpec {
  Protocol protocol = Protocol::Blocks;
  std::vector<View> views = {View::Left, View::Front, View::Right};
  bool include_sb = false;
  bool include_avatar = true;  // novel-signer protocol only; blocks always train on A
  std::vector<uint64_t> seeds = {1};
};

struct ExperimentResult {
  // headline aggregation: std across folds (and seeds, pooled)
  MetricsTable by_fold;
  // alternative grouping: per-seed fold means, std across seeds
  MetricsTable by_seed;
  std::vector<RelativeDrop> drops;
};

// Trains one model per fold (and seed), evaluates each on every view of the
// manifest's test signers, and aggregates mean +- std per test view. Rows
// carry the paper-style train-view/signers tags (e.g. lfr / 123A+Sb).
ExperimentResult run_experiment(const DatasetManifest& manifest, ClipStore& store,
                                const ExperimentSpec& spec, const ModelConfig& cfg,
                                const OptimSettings& optim);

// Writes <prefix>.csv and <prefix>.md (plus <prefix>_drops.csv when
// front-view rows exist).
void write_reports(const ExperimentResult& result, const std::string& prefix);

std::string signers_tag(const ExperimentSpec& spec);

}  // namespace geomsign
