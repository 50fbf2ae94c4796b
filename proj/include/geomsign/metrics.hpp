#pragma once

#include <string>
#include <vector>

#include "geomsign/tensor.hpp"

namespace geomsign {

// Fraction of rows whose label ranks among the k highest logits; ties are
// broken in favour of the lower class index.
template <typename Real>
double topk_accuracy(const Tensor<Real>& logits, const std::vector<int>& labels, int k) {
  if (logits.rank() != 2 || labels.size() != logits.shape[0])
    throw std::invalid_argument("topk_accuracy: logits must be N x C with N labels");
  const int c = static_cast<int>(logits.shape[1]);
  if (k < 1 || k > c) throw std::invalid_argument("topk_accuracy: k out of range");
  size_t hits = 0;
  for (size_t r = 0; r < logits.shape[0]; ++r) {
    const Real* row = logits.data.data() + r * logits.shape[1];
    const int label = labels[r];
    const Real lv = row[label];
    int ahead = 0;  // classes ranked strictly before the label
    for (int j = 0; j < c; ++j)
      if (row[j] > lv || (row[j] == lv && j < label)) ++ahead;
    if (ahead < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(logits.shape[0]);
}

// Mean and sample standard deviation (ddof = 1; 0 when n < 2) over per-fold
// or per-run scores.
struct MeanStd {
  double mean = 0;
  double std = 0;
  size_t n = 0;
};
MeanStd mean_std(const std::vector<double>& values);

struct MetricsRow {
  std::string train_views;  // "lfr"
  std::string signers;      // "12A", "123A", "123A+Sb"
  std::string test_view;    // "l" / "f" / "r"
  std::string variant;      // "invariant" / "baseline"
  double top1_mean = 0, top1_std = 0;
  double top3_mean = 0, top3_std = 0;
  size_t n_folds = 0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
};

// CSV with the fixed column set train_views, signers, test_view, variant,
// top1_mean, top1_std, top3_mean, top3_std, n_folds.
std::string render_csv(const MetricsTable& table);

// Aligned markdown table. When rows for both variants are present, each
// invariant row gains an absolute-gain column (invariant minus baseline
// Top-1 on the matching configuration), formatted like "+.08".
std::string render_markdown(const MetricsTable& table);

std::string format_gain(double gain);

// (front - side) / front for every side view of front-trained rows
struct RelativeDrop {
  std::string train_views, signers, variant;
  std::string side_view;
  double relative_drop = 0;
};
std::vector<RelativeDrop> relative_drops(const MetricsTable& table);

}  // namespace geomsign
