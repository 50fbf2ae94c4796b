#include "geomsign/types.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geomsign/errors.hpp"
#include "json.hpp"

namespace geomsign {

using nlohmann::json;

const char* to_string(SignerTag s) {
  switch (s) {
    case SignerTag::S1: return "S1";
    case SignerTag::S2: return "S2";
    case SignerTag::S3: return "S3";
    case SignerTag::A: return "A";
    case SignerTag::Sb: return "Sb";
  }
  return "?";
}

std::optional<SignerTag> parse_signer(const std::string& s) {
  for (SignerTag t : kAllSigners)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

char view_code(View v) { return v == View::Left ? 'l' : (v == View::Right ? 'r' : 'f'); }

const char* to_string(View v) {
  switch (v) {
    case View::Left: return "left";
    case View::Front: return "front";
    case View::Right: return "right";
  }
  return "?";
}

std::optional<View> parse_view(const std::string& s) {
  for (View v : kAllViews)
    if (s == to_string(v)) return v;
  if (s.size() == 1) return parse_view_code(s[0]);
  return std::nullopt;
}

std::optional<View> parse_view_code(char c) {
  switch (c) {
    case 'l': return View::Left;
    case 'f': return View::Front;
    case 'r': return View::Right;
  }
  return std::nullopt;
}

const char* to_string(Handedness h) {
  switch (h) {
    case Handedness::One: return "one";
    case Handedness::TwoSym: return "two_sym";
    case Handedness::TwoAsym: return "two_asym";
  }
  return "?";
}

std::optional<Handedness> parse_handedness(const std::string& s) {
  for (Handedness h : {Handedness::One, Handedness::TwoSym, Handedness::TwoAsym})
    if (s == to_string(h)) return h;
  return std::nullopt;
}

std::optional<std::string> check_pose_sequence(const PoseSequence& seq) {
  if (seq.frames.size() % (PoseSequence::kLandmarks * PoseSequence::kChannels) != 0)
    return "frame buffer is not a multiple of 75x3";
  if (seq.frame_count() < 1) return "clip has no frames";
  for (float v : seq.frames)
    if (!std::isfinite(v)) return "non-finite coordinate";
  return std::nullopt;
}

std::string clip_identifier(int gloss_id, SignerTag signer, View view) {
  std::ostringstream os;
  os << gloss_id << '_' << to_string(signer) << '_' << view_code(view);
  return os.str();
}

std::vector<Violation> validate_manifest(const DatasetManifest& manifest) {
  std::vector<Violation> out;
  std::set<int> vocab_ids;
  for (const auto& g : manifest.vocabulary) {
    if (!vocab_ids.insert(g.gloss_id).second)
      out.push_back({"vocabulary:" + std::to_string(g.gloss_id), "duplicate gloss",
                     "gloss_id listed twice in the vocabulary"});
    const bool two_handed = g.handedness != Handedness::One;
    if (two_handed && !g.weak_handshape)
      out.push_back({"vocabulary:" + std::to_string(g.gloss_id), "missing weak handshape",
                     "two-handed sign without a weak handshape label"});
    if (!two_handed && g.weak_handshape)
      out.push_back({"vocabulary:" + std::to_string(g.gloss_id), "unexpected weak handshape",
                     "one-handed sign carries a weak handshape label"});
  }
  std::set<std::tuple<int, int, int>> triples;
  for (const auto& e : manifest.entries) {
    if (!triples.insert({static_cast<int>(e.signer), static_cast<int>(e.view), e.gloss_id})
             .second)
      out.push_back({e.clip_id, "duplicate triple",
                     "another entry already covers (signer, view, gloss) = (" +
                         std::string(to_string(e.signer)) + ", " + to_string(e.view) + ", " +
                         std::to_string(e.gloss_id) + ")"});
    if (!vocab_ids.count(e.gloss_id))
      out.push_back({e.clip_id, "unknown gloss",
                     "gloss_id " + std::to_string(e.gloss_id) + " is not in the vocabulary"});
    const std::string expect = clip_identifier(e.gloss_id, e.signer, e.view);
    if (e.clip_id != expect)
      out.push_back({e.clip_id, "bad clip id", "expected '" + expect + "'"});
  }
  return out;
}

static json gloss_to_json(const GlossEntry& g) {
  json j{{"gloss_id", g.gloss_id},
         {"label", g.label},
         {"handedness", to_string(g.handedness)},
         {"strong_handshape", g.strong_handshape}};
  if (g.weak_handshape) j["weak_handshape"] = *g.weak_handshape;
  return j;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["version"] = 1;
  j["vocabulary"] = json::array();
  for (const auto& g : m.vocabulary) j["vocabulary"].push_back(gloss_to_json(g));
  j["entries"] = json::array();
  for (const auto& e : m.entries)
    j["entries"].push_back(json{{"clip_id", e.clip_id},
                                {"path", e.path},
                                {"signer", to_string(e.signer)},
                                {"view", to_string(e.view)},
                                {"gloss_id", e.gloss_id}});
  return j.dump(2);
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("version", 0) != 1)
      throw FormatError("manifest: unsupported or missing version (want 1)");
    DatasetManifest m;
    for (const auto& g : j.at("vocabulary")) {
      GlossEntry e;
      e.gloss_id = g.at("gloss_id").get<int>();
      e.label = g.at("label").get<std::string>();
      const auto h = parse_handedness(g.at("handedness").get<std::string>());
      if (!h) throw FormatError("manifest: bad handedness value");
      e.handedness = *h;
      e.strong_handshape = g.at("strong_handshape").get<std::string>();
      if (g.contains("weak_handshape"))
        e.weak_handshape = g.at("weak_handshape").get<std::string>();
      m.vocabulary.push_back(std::move(e));
    }
    for (const auto& en : j.at("entries")) {
      ManifestEntry e;
      e.clip_id = en.at("clip_id").get<std::string>();
      e.path = en.at("path").get<std::string>();
      const auto s = parse_signer(en.at("signer").get<std::string>());
      const auto v = parse_view(en.at("view").get<std::string>());
      if (!s || !v) throw FormatError("manifest: bad signer or view in entry " + e.clip_id);
      e.signer = *s;
      e.view = *v;
      e.gloss_id = en.at("gloss_id").get<int>();
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: missing or mistyped field: ") + e.what());
  }
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading manifest '" + path + "'");
  return manifest_from_json(buf.str());
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  out << manifest_to_json(manifest) << '\n';
  if (!out) throw IoError("error while writing manifest '" + path + "'");
}

}  // namespace geomsign
