#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geomsign/types.hpp"

namespace geomsign {

constexpr uint64_t kDefaultPlanSeed = 0x6e67743230300001ULL;

// Train/validation/test clip assignment for one fold of one test block.
// Test lists never contain signer A or Sb, and no clip of the test signer
// leaks into train or val for the same gloss.
struct FoldPlan {
  SignerTag test_signer = SignerTag::S3;
  View test_view = View::Front;
  int fold_index = 0;
  bool include_sb = false;
  std::vector<View> views_in_training;  // canonical order left, front, right
  uint64_t seed = kDefaultPlanSeed;

  struct GlossAssignment {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
  };
  std::map<int, GlossAssignment> assignments;

  // compact tag for filenames/reports, e.g. "block-S2-fold-3"
  std::string name() const;
};

// Cross-validation blocks per the k-fold scheme: one block per human test
// signer, k = 3 folds for a single training view and k = 6 otherwise, so the
// union is 9 or 18 plans. Per gloss the non-test pool (3 remaining signers x
// views) is sorted by clip identifier and validation clips rotate through it
// deterministically: fold i takes position i when one val clip is due, and
// positions (2i, 2i+1) mod 9 for the three-view scheme's val pairs. Sb
// contributes one extra front-view training clip when include_sb is set.
//
// Throws ValidationError naming (gloss, signer, view) when a required clip
// is missing, std::invalid_argument when views is empty or oversized.
std::vector<FoldPlan> make_blocks(const DatasetManifest& manifest,
                                  const std::vector<View>& views, bool include_sb);

// Novel-signer protocol: S3 is the test signer across all of its views;
// training draws on S1 and S2 (all views), plus the avatar (all views) and
// the Sb front view when flagged. A seeded 10% of the training clips is held
// out for validation.
FoldPlan make_novel_signer_split(const DatasetManifest& manifest, bool include_sb,
                                 bool include_avatar, uint64_t seed = kDefaultPlanSeed);

// Variant of the novel-signer split restricted to a subset of training
// views (the harness uses it for front-only training runs).
FoldPlan make_novel_signer_split_views(const DatasetManifest& manifest,
                                       const std::vector<View>& views_in_training,
                                       bool include_sb, bool include_avatar,
                                       uint64_t seed = kDefaultPlanSeed);

// Same train/val assignments, test list re-pointed at another view of the
// plan's test signer (multi-view evaluation reuses one trained fold).
FoldPlan retarget_test_view(const FoldPlan& plan, View view);

std::string fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const std::string& text);
void save_fold_plan(const FoldPlan& plan, const std::string& path);
FoldPlan load_fold_plan(const std::string& path);

// "lfr" style tag in canonical order
std::string views_tag(const std::vector<View>& views);

}  // namespace geomsign
