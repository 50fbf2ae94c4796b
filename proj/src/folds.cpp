#include "geomsign/folds.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "geomsign/errors.hpp"
#include "geomsign/rng.hpp"
#include "json.hpp"

namespace geomsign {

using nlohmann::json;

std::string FoldPlan::name() const {
  std::ostringstream os;
  os << "block-" << to_string(test_signer) << "-fold-" << fold_index;
  return os.str();
}

std::string views_tag(const std::vector<View>& views) {
  std::string tag;
  for (View v : kAllViews)
    if (std::count(views.begin(), views.end(), v)) tag += view_code(v);
  return tag;
}

namespace {

std::vector<View> canonical_views(const std::vector<View>& views) {
  std::vector<View> out;
  for (View v : kAllViews)
    if (std::count(views.begin(), views.end(), v)) out.push_back(v);
  return out;
}

// (signer, view, gloss) -> clip id for everything present in the manifest
using ClipIndex = std::set<std::string>;

ClipIndex index_clips(const DatasetManifest& manifest) {
  ClipIndex idx;
  for (const auto& e : manifest.entries)
    idx.insert(clip_identifier(e.gloss_id, e.signer, e.view));
  return idx;
}

std::string require_clip(const ClipIndex& idx, int gloss, SignerTag s, View v) {
  std::string id = clip_identifier(gloss, s, v);
  if (!idx.count(id))
    throw ValidationError("fold planner: manifest is missing clip (gloss " +
                          std::to_string(gloss) + ", signer " + to_string(s) + ", view " +
                          to_string(v) + ")");
  return id;
}

View nominal_test_view(const std::vector<View>& views) {
  if (views.size() == 1) return views[0];
  if (std::count(views.begin(), views.end(), View::Front)) return View::Front;
  return views[0];
}

}  // namespace

std::vector<FoldPlan> make_blocks(const DatasetManifest& manifest,
                                  const std::vector<View>& views_in, bool include_sb) {
  const auto views = canonical_views(views_in);
  if (views.empty() || views.size() > 3)
    throw std::invalid_argument("make_blocks: need between 1 and 3 training views");
  const int k = views.size() == 1 ? 3 : 6;
  const auto idx = index_clips(manifest);
  const View test_view = nominal_test_view(views);

  std::vector<FoldPlan> plans;
  for (SignerTag test_signer : kHumanTestSigners) {
    for (int fold = 0; fold < k; ++fold) {
      FoldPlan plan;
      plan.test_signer = test_signer;
      plan.test_view = test_view;
      plan.fold_index = fold;
      plan.include_sb = include_sb;
      plan.views_in_training = views;
      plan.seed = kDefaultPlanSeed;

      for (const auto& gloss : manifest.vocabulary) {
        const int gid = gloss.gloss_id;
        // the full signer grid must exist before any fold is usable
        std::vector<std::string> pool;
        for (SignerTag s : {SignerTag::S1, SignerTag::S2, SignerTag::S3, SignerTag::A})
          for (View v : views) {
            const auto id = require_clip(idx, gid, s, v);
            if (s != test_signer) pool.push_back(id);
          }
        std::sort(pool.begin(), pool.end());

        FoldPlan::GlossAssignment a;
        std::set<size_t> val_pos;
        if (views.size() == 3) {
          val_pos.insert((2 * static_cast<size_t>(fold)) % pool.size());
          val_pos.insert((2 * static_cast<size_t>(fold) + 1) % pool.size());
        } else {
          val_pos.insert(static_cast<size_t>(fold) % pool.size());
        }
        for (size_t p = 0; p < pool.size(); ++p)
          (val_pos.count(p) ? a.val : a.train).push_back(pool[p]);
        if (include_sb)
          a.train.push_back(require_clip(idx, gid, SignerTag::Sb, View::Front));
        a.test.push_back(require_clip(idx, gid, test_signer, test_view));
        plan.assignments.emplace(gid, std::move(a));
      }
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

FoldPlan make_novel_signer_split(const DatasetManifest& manifest, bool include_sb,
                                 bool include_avatar, uint64_t seed) {
  return make_novel_signer_split_views(
      manifest, {View::Left, View::Front, View::Right}, include_sb, include_avatar, seed);
}

FoldPlan make_novel_signer_split_views(const DatasetManifest& manifest,
                                       const std::vector<View>& views_in, bool include_sb,
                                       bool include_avatar, uint64_t seed) {
  const auto views = canonical_views(views_in);
  if (views.empty()) throw std::invalid_argument("novel-signer split: no training views");
  const auto idx = index_clips(manifest);

  FoldPlan plan;
  plan.test_signer = SignerTag::S3;
  plan.test_view = nominal_test_view(views);
  plan.fold_index = 0;
  plan.include_sb = include_sb;
  plan.views_in_training = views;
  plan.seed = seed;

  std::vector<std::pair<int, std::string>> train_all;  // (gloss, clip)
  for (const auto& gloss : manifest.vocabulary) {
    const int gid = gloss.gloss_id;
    FoldPlan::GlossAssignment a;
    for (SignerTag s : {SignerTag::S1, SignerTag::S2})
      for (View v : views) train_all.emplace_back(gid, require_clip(idx, gid, s, v));
    if (include_avatar)
      for (View v : views) train_all.emplace_back(gid, require_clip(idx, gid, SignerTag::A, v));
    if (include_sb)
      train_all.emplace_back(gid, require_clip(idx, gid, SignerTag::Sb, View::Front));
    // test covers every view of the held-out signer
    for (View v : kAllViews) a.test.push_back(require_clip(idx, gid, SignerTag::S3, v));
    plan.assignments.emplace(gid, std::move(a));
  }

  std::sort(train_all.begin(), train_all.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  Rng rng = Rng(seed).fork("novel-signer-val");
  rng.shuffle(train_all);
  const size_t n_val = (train_all.size() + 9) / 10;  // ceil(10%)
  for (size_t i = 0; i < train_all.size(); ++i) {
    auto& a = plan.assignments.at(train_all[i].first);
    (i < n_val ? a.val : a.train).push_back(train_all[i].second);
  }
  for (auto& [gid, a] : plan.assignments) {
    std::sort(a.train.begin(), a.train.end());
    std::sort(a.val.begin(), a.val.end());
  }
  return plan;
}

FoldPlan retarget_test_view(const FoldPlan& plan, View view) {
  FoldPlan out = plan;
  out.test_view = view;
  for (auto& [gid, a] : out.assignments)
    a.test = {clip_identifier(gid, plan.test_signer, view)};
  return out;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
  json j;
  j["version"] = 1;
  j["test_signer"] = to_string(plan.test_signer);
  j["test_view"] = to_string(plan.test_view);
  j["fold_index"] = plan.fold_index;
  j["include_sb"] = plan.include_sb;
  j["seed"] = plan.seed;
  j["views_in_training"] = json::array();
  for (View v : plan.views_in_training) j["views_in_training"].push_back(to_string(v));
  json asg = json::object();
  for (const auto& [gid, a] : plan.assignments)
    asg[std::to_string(gid)] = json{{"train", a.train}, {"val", a.val}, {"test", a.test}};
  j["assignments"] = std::move(asg);
  return j.dump(2);
}

FoldPlan fold_plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("fold plan is not valid JSON: ") + e.what());
  }
  try {
    FoldPlan plan;
    const auto s = parse_signer(j.at("test_signer").get<std::string>());
    const auto v = parse_view(j.at("test_view").get<std::string>());
    if (!s || !v) throw FormatError("fold plan: bad test signer or view");
    plan.test_signer = *s;
    plan.test_view = *v;
    plan.fold_index = j.at("fold_index").get<int>();
    plan.include_sb = j.at("include_sb").get<bool>();
    plan.seed = j.at("seed").get<uint64_t>();
    for (const auto& vs : j.at("views_in_training")) {
      const auto pv = parse_view(vs.get<std::string>());
      if (!pv) throw FormatError("fold plan: bad training view");
      plan.views_in_training.push_back(*pv);
    }
    for (const auto& [key, val] : j.at("assignments").items()) {
      FoldPlan::GlossAssignment a;
      a.train = val.at("train").get<std::vector<std::string>>();
      a.val = val.at("val").get<std::vector<std::string>>();
      a.test = val.at("test").get<std::vector<std::string>>();
      plan.assignments.emplace(std::stoi(key), std::move(a));
    }
    return plan;
  } catch (const json::exception& e) {
    throw FormatError(std::string("fold plan: missing or mistyped field: ") + e.what());
  }
}

void save_fold_plan(const FoldPlan& plan, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write fold plan '" + path + "'");
  out << fold_plan_to_json(plan) << '\n';
  if (!out) throw IoError("error while writing fold plan '" + path + "'");
}

FoldPlan load_fold_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open fold plan '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fold_plan_from_json(buf.str());
}

}  // namespace geomsign
