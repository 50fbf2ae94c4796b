#include "geomsign/train.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "geomsign/adam.hpp"
#include "geomsign/errors.hpp"
#include "geomsign/metrics.hpp"
#include "geomsign/rng.hpp"
#include "json.hpp"

namespace geomsign {

using nlohmann::json;

std::string optim_to_json(const OptimSettings& o) {
  json j{{"batch_size", o.batch_size},
         {"learning_rate", o.learning_rate},
         {"warmup_steps", o.warmup_steps},
         {"temporal_weight_decay", o.temporal_weight_decay},
         {"patience", o.patience},
         {"max_epochs", o.max_epochs},
         {"t_frames", o.t_frames},
         {"microbatch", o.microbatch},
         {"stop_at_train_top1", o.stop_at_train_top1}};
  return j.dump(2);
}

OptimSettings optim_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("optimizer config is not valid JSON: ") + e.what());
  }
  OptimSettings o;
  o.batch_size = j.value("batch_size", o.batch_size);
  o.learning_rate = j.value("learning_rate", o.learning_rate);
  o.warmup_steps = j.value("warmup_steps", o.warmup_steps);
  o.temporal_weight_decay = j.value("temporal_weight_decay", o.temporal_weight_decay);
  o.patience = j.value("patience", o.patience);
  o.max_epochs = j.value("max_epochs", o.max_epochs);
  o.t_frames = j.value("t_frames", o.t_frames);
  o.microbatch = j.value("microbatch", o.microbatch);
  o.stop_at_train_top1 = j.value("stop_at_train_top1", o.stop_at_train_top1);
  if (o.batch_size < 1 || o.microbatch < 1 || o.max_epochs < 1 || o.t_frames < 1 ||
      o.patience < 0)
    throw FormatError("optimizer config: out-of-range setting");
  return o;
}

namespace {

std::vector<std::string> collect(const FoldPlan& plan,
                                 const std::vector<std::string> FoldPlan::GlossAssignment::*list) {
  std::vector<std::string> out;
  for (const auto& [gid, a] : plan.assignments)
    for (const auto& id : a.*list) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::string> plan_train_clips(const FoldPlan& plan) {
  return collect(plan, &FoldPlan::GlossAssignment::train);
}
std::vector<std::string> plan_val_clips(const FoldPlan& plan) {
  return collect(plan, &FoldPlan::GlossAssignment::val);
}
std::vector<std::string> plan_test_clips(const FoldPlan& plan) {
  return collect(plan, &FoldPlan::GlossAssignment::test);
}

Tensor<float> forward_logits(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                             const Batch& batch) {
  const MessageStructure ms =
      build_message_structure(default_edges(), cfg.num_nodes, cfg.num_orientations);
  Tape<float> tape;
  std::vector<Tape<float>::Id> pids;
  pids.reserve(params.size());
  for (const auto& p : params) pids.push_back(tape.leaf(p, false));
  const auto logits = ponita_forward(tape, cfg, ms, pids, batch.positions, &batch.depth);
  return tape.val(logits);
}

namespace {

struct EvalAccum {
  Tensor<float> logits;  // N x C, filled batch by batch
  std::vector<int> labels;
  double loss_sum = 0;  // summed per-clip loss
};

void eval_batches(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                  ClipStore& store, const std::vector<std::string>& ids, int batch_size,
                  const MessageStructure& ms, EvalAccum& acc) {
  const size_t c = static_cast<size_t>(cfg.num_classes);
  acc.logits = Tensor<float>({ids.size(), c});
  acc.labels.resize(ids.size());
  acc.loss_sum = 0;
  for (size_t start = 0; start < ids.size(); start += static_cast<size_t>(batch_size)) {
    const size_t stop = std::min(ids.size(), start + static_cast<size_t>(batch_size));
    const std::vector<std::string> chunk(ids.begin() + start, ids.begin() + stop);
    const Batch batch = make_batch(store, chunk);
    Tape<float> tape;
    std::vector<Tape<float>::Id> pids;
    for (const auto& p : params) pids.push_back(tape.leaf(p, false));
    const auto logits = ponita_forward(tape, cfg, ms, pids, batch.positions, &batch.depth);
    const auto loss = tape.softmax_cross_entropy(logits, batch.labels);
    acc.loss_sum += static_cast<double>(tape.val(loss).data[0]) * static_cast<double>(chunk.size());
    const auto& lv = tape.val(logits);
    std::copy(lv.data.begin(), lv.data.end(), acc.logits.data.begin() + start * c);
    std::copy(batch.labels.begin(), batch.labels.end(), acc.labels.begin() + start);
  }
}

}  // namespace

EvalResult evaluate_params(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                           ClipStore& store, std::vector<std::string> clip_ids,
                           int batch_size) {
  if (clip_ids.empty()) throw ValidationError("evaluate: no clips to score");
  std::sort(clip_ids.begin(), clip_ids.end());
  const MessageStructure ms =
      build_message_structure(default_edges(), cfg.num_nodes, cfg.num_orientations);
  EvalAccum acc;
  eval_batches(cfg, params, store, clip_ids, batch_size, ms, acc);
  EvalResult r;
  r.n_clips = clip_ids.size();
  r.top1 = topk_accuracy(acc.logits, acc.labels, 1);
  r.top3 = topk_accuracy(acc.logits, acc.labels, std::min(3, cfg.num_classes));
  r.loss = acc.loss_sum / static_cast<double>(clip_ids.size());
  return r;
}

EvalResult evaluate(const ModelConfig& cfg, const std::vector<Tensor<float>>& params,
                    ClipStore& store, const FoldPlan& plan, View test_view) {
  return evaluate_params(cfg, params, store,
                         plan_test_clips(retarget_test_view(plan, test_view)));
}

EvalResult evaluate(const Checkpoint& ckpt, ClipStore& store, const FoldPlan& plan,
                    View test_view) {
  return evaluate(ckpt.config, ckpt.params, store, plan, test_view);
}

TrainRun train(const FoldPlan& plan, ClipStore& store, const ModelConfig& cfg,
               const OptimSettings& optim, uint64_t seed, const std::string& out_dir) {
  validate_config(cfg);
  if (static_cast<size_t>(cfg.num_classes) != store.num_classes())
    throw std::invalid_argument("train: config num_classes (" +
                                std::to_string(cfg.num_classes) + ") != vocabulary size (" +
                                std::to_string(store.num_classes()) + ")");
  if (store.t_frames() != optim.t_frames)
    throw std::invalid_argument("train: clip store t_frames != optimizer t_frames");

  const std::vector<std::string> train_ids = plan_train_clips(plan);
  const std::vector<std::string> val_ids = plan_val_clips(plan);
  if (train_ids.empty()) throw ValidationError("train: empty train split");
  const bool has_val = !val_ids.empty();

  const MessageStructure ms =
      build_message_structure(default_edges(), cfg.num_nodes, cfg.num_orientations);
  const auto specs = param_specs(cfg);
  std::vector<bool> decay_set;
  for (const auto& s : specs) decay_set.push_back(s.temporal_decay);

  const Rng root(seed);
  std::vector<Tensor<float>> params = init_params<float>(cfg, root.fork("init").seed());
  AdamState<float> adam = AdamState<float>::init(params);

  TrainRun run;
  run.config = cfg;
  run.optim = optim;
  run.seed = seed;

  int epochs_since_best = 0;
  char ctx[96];
  for (int epoch = 0; epoch < optim.max_epochs; ++epoch) {
    Rng order_rng = root.fork("epoch-" + std::to_string(epoch));
    std::vector<std::string> order = train_ids;
    order_rng.shuffle(order);

    double epoch_loss = 0;
    size_t epoch_hits = 0;
    for (size_t start = 0, batch_no = 0; start < order.size();
         start += static_cast<size_t>(optim.batch_size), ++batch_no) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(optim.batch_size));
      const size_t bsz = stop - start;

      std::vector<Tensor<float>> grads(params.size());
      for (size_t mstart = start; mstart < stop;
           mstart += static_cast<size_t>(optim.microbatch)) {
        const size_t mstop = std::min(stop, mstart + static_cast<size_t>(optim.microbatch));
        const std::vector<std::string> chunk(order.begin() + mstart, order.begin() + mstop);
        const Batch batch = make_batch(store, chunk);

        Tape<float> tape;
        std::snprintf(ctx, sizeof(ctx), "epoch %d, batch %zu", epoch, batch_no);
        tape.set_context(ctx);
        std::vector<Tape<float>::Id> pids;
        for (const auto& p : params) pids.push_back(tape.leaf(p, true));
        const auto logits = ponita_forward(tape, cfg, ms, pids, batch.positions, &batch.depth);
        auto loss = tape.softmax_cross_entropy(logits, batch.labels);
        // scale so that accumulated micro-gradients equal the batch mean
        const float w = static_cast<float>(chunk.size()) / static_cast<float>(bsz);
        loss = tape.mul(loss, tape.leaf(Tensor<float>::scalar(w)));
        tape.backward(loss);

        epoch_loss += static_cast<double>(tape.val(loss).data[0]) * static_cast<double>(bsz);
        const auto& lv = tape.val(logits);
        for (size_t i = 0; i < chunk.size(); ++i) {
          const float* row = lv.data.data() + i * lv.shape[1];
          size_t best = 0;
          for (size_t j = 1; j < lv.shape[1]; ++j)
            if (row[j] > row[best]) best = j;
          if (static_cast<int>(best) == batch.labels[i]) ++epoch_hits;
        }
        for (size_t i = 0; i < params.size(); ++i) {
          if (const auto* g = tape.grad_of(pids[i])) {
            if (grads[i].data.empty())
              grads[i] = *g;
            else
              for (size_t j = 0; j < g->data.size(); ++j) grads[i].data[j] += g->data[j];
          }
        }
      }
      adam_step(params, grads, adam, optim.learning_rate,
                static_cast<size_t>(optim.warmup_steps), optim.temporal_weight_decay,
                decay_set);
      run.total_steps += 1;
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = epoch_loss / static_cast<double>(order.size());
    st.train_top1 = static_cast<double>(epoch_hits) / static_cast<double>(order.size());
    if (has_val) {
      const EvalResult v = evaluate_params(cfg, params, store, val_ids, optim.batch_size);
      st.val_loss = v.loss;
      st.val_top1 = v.top1;
    } else {
      st.val_loss = st.train_loss;
      st.val_top1 = st.train_top1;
    }
    run.curves.push_back(st);

    if (run.best_epoch < 0 || st.val_top1 > run.best_val_top1) {
      run.best_epoch = epoch;
      run.best_val_top1 = st.val_top1;
      run.best_params = params;
      epochs_since_best = 0;
    } else {
      epochs_since_best += 1;
    }
    if (optim.stop_at_train_top1 > 0 && st.train_top1 >= optim.stop_at_train_top1) break;
    if (epochs_since_best > optim.patience) break;
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    run.curves_path = (std::filesystem::path(out_dir) / "curves.csv").string();
    std::ofstream csv(run.curves_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write '" + run.curves_path + "'");
    csv << "epoch,train_loss,train_top1,val_loss,val_top1\n";
    char line[160];
    for (const auto& st : run.curves) {
      std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g\n", st.epoch, st.train_loss,
                    st.train_top1, st.val_loss, st.val_top1);
      csv << line;
    }
    run.checkpoint_dir = (std::filesystem::path(out_dir) / "checkpoint").string();
    Checkpoint ckpt;
    ckpt.config = cfg;
    ckpt.training_step = run.total_steps;
    ckpt.params = run.best_params;
    save_checkpoint(ckpt, run.checkpoint_dir);
  }
  return run;
}

}  // namespace geomsign
