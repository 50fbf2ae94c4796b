#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geomsign/checkpoint.hpp"
#include "geomsign/dataset.hpp"
#include "geomsign/folds.hpp"
#include "geomsign/model.hpp"

namespace geomsign {

// Optimizer and loop settings (batch 32, lr 5e-3 with a 100-step linear
// warmup, decoupled decay 1e-3 on the temporal-convolution weights, early
// stopping on validation Top-1).
struct OptimSettings {
  int batch_size = 32;
  double learning_rate = 5e-3;
  int warmup_steps = 100;
  double temporal_weight_decay = 1e-3;
  int patience = 25;
  int max_epochs = 500;
  size_t t_frames = 64;           // fixed clip length fed to the model
  int microbatch = 8;             // gradient-accumulation slice, numerics-neutral
  double stop_at_train_top1 = -1; // optional early exit once training accuracy is reached
};

std::string optim_to_json(const OptimSettings& o);
OptimSettings optim_from_json(const std::string& text);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0, train_top1 = 0;
  double val_loss = 0, val_top1 = 0;
};

struct TrainRun {
  ModelConfig config;
  OptimSettings optim;
  uint64_t seed = 0;
  std::vector<EpochStats> curves;
  int best_epoch = -1;           // epoch with maximal validation Top-1 (earliest on tie)
  double best_val_top1 = 0;
  size_t total_steps = 0;
  std::vector<Tensor<float>> best_params;
  std::string checkpoint_dir;    // set when out_dir was given
  std::string curves_path;
};

// Trains on the plan's train split with seeded shuffling and evaluates the
// val split each epoch. When out_dir is non-empty, writes curves.csv and the
// best checkpoint under it. All randomness derives from `seed`.
TrainRun train(const FoldPlan& plan, ClipStore& store, const ModelConfig& cfg,
               const OptimSettings& optim, uint64_t seed, const std::string& out_dir = "");

struct EvalResult {
  double top1 = 0;
  double top3 = 0;
  double loss = 0;
  size_t n_clips = 0;
};

// Deterministic forward pass over the given clips (sorted by identifier).
EvalResult evaluate_params(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                           ClipStore& store, std::vector<std::string> clip_ids,
                           int batch_size = 32);

// Evaluates the plan's test clips restricted to `test_view` (the test list
// is re-pointed at that view of the plan's test signer).
EvalResult evaluate(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                    ClipStore& store, const FoldPlan& plan, View test_view);

EvalResult evaluate(const Checkpoint& ckpt, ClipStore& store, const FoldPlan& plan,
                    View test_view);

// Raw logits for a batch of clips (used by invariance checks and tools).
Tensor<float> forward_logits(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                             const Batch& batch);

std::vector<std::string> plan_train_clips(const FoldPlan& plan);
std::vector<std::string> plan_val_clips(const FoldPlan& plan);
std::vector<std::string> plan_test_clips(const FoldPlan& plan);

}  // namespace geomsign
