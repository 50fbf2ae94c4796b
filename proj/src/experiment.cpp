#include "geomsign/experiment.hpp"

#include <fstream>
#include <map>

#include "geomsign/errors.hpp"

namespace geomsign {

std::string signers_tag(const ExperimentSpec& spec) {
  std::string tag;
  if (spec.protocol == Protocol::Blocks) {
    tag = "123A";
  } else {
    tag = "12";
    if (spec.include_avatar) tag += "A";
  }
  if (spec.include_sb) tag += "+Sb";
  return tag;
}

ExperimentResult run_experiment(const DatasetManifest& manifest, ClipStore& store,
                                const ExperimentSpec& spec, const ModelConfig& cfg,
                                const OptimSettings& optim) {
  if (spec.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");

  std::vector<FoldPlan> plans;
  if (spec.protocol == Protocol::Blocks) {
    plans = make_blocks(manifest, spec.views, spec.include_sb);
  } else {
    plans = {make_novel_signer_split_views(manifest, spec.views, spec.include_sb,
                                           spec.include_avatar)};
  }

  // per test view: flat scores over (seed, fold) and per-seed fold means
  std::map<View, std::vector<double>> top1_all, top3_all;
  std::map<View, std::vector<double>> top1_seed_means, top3_seed_means;

  for (uint64_t seed : spec.seeds) {
    std::map<View, std::vector<double>> top1_this_seed, top3_this_seed;
    for (const auto& plan : plans) {
      const TrainRun run = train(plan, store, cfg, optim, seed);
      for (View v : kAllViews) {
        const EvalResult e = evaluate(cfg, run.best_params, store, plan, v);
        top1_all[v].push_back(e.top1);
        top3_all[v].push_back(e.top3);
        top1_this_seed[v].push_back(e.top1);
        top3_this_seed[v].push_back(e.top3);
      }
    }
    for (View v : kAllViews) {
      top1_seed_means[v].push_back(mean_std(top1_this_seed[v]).mean);
      top3_seed_means[v].push_back(mean_std(top3_this_seed[v]).mean);
    }
  }

  ExperimentResult result;
  const std::string views = views_tag(spec.views);
  const std::string signers = signers_tag(spec);
  const std::string variant = to_string(cfg.variant);
  for (View v : kAllViews) {
    MetricsRow row;
    row.train_views = views;
    row.signers = signers;
    row.test_view = std::string(1, view_code(v));
    row.variant = variant;
    const MeanStd t1 = mean_std(top1_all[v]);
    const MeanStd t3 = mean_std(top3_all[v]);
    row.top1_mean = t1.mean;
    row.top1_std = t1.std;
    row.top3_mean = t3.mean;
    row.top3_std = t3.std;
    row.n_folds = t1.n;
    result.by_fold.rows.push_back(row);

    MetricsRow srow = row;
    const MeanStd s1 = mean_std(top1_seed_means[v]);
    const MeanStd s3 = mean_std(top3_seed_means[v]);
    srow.top1_mean = s1.mean;
    srow.top1_std = s1.std;
    srow.top3_mean = s3.mean;
    srow.top3_std = s3.std;
    srow.n_folds = s1.n;
    result.by_seed.rows.push_back(srow);
  }
  result.drops = relative_drops(result.by_fold);
  return result;
}

void write_reports(const ExperimentResult& result, const std::string& prefix) {
  {
    std::ofstream csv(prefix + ".csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write '" + prefix + ".csv'");
    csv << render_csv(result.by_fold);
  }
  {
    std::ofstream md(prefix + ".md", std::ios::binary | std::ios::trunc);
    if (!md) throw IoError("cannot write '" + prefix + ".md'");
    md << render_markdown(result.by_fold);
  }
  {
    std::ofstream csv(prefix + "_by_seed.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write '" + prefix + "_by_seed.csv'");
    csv << render_csv(result.by_seed);
  }
  if (!result.drops.empty()) {
    std::ofstream csv(prefix + "_drops.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write '" + prefix + "_drops.csv'");
    csv << "train_views,signers,variant,side_view,relative_drop\n";
    char line[128];
    for (const auto& d : result.drops) {
      std::snprintf(line, sizeof(line), "%s,%s,%s,%s,%.6f\n", d.train_views.c_str(),
                    d.signers.c_str(), d.variant.c_str(), d.side_view.c_str(), d.relative_drop);
      csv << line;
    }
  }
}

}  // namespace geomsign
