#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geomsign {

// ---- signers -------------------------------------------------------------

// S1..S3 are the human signers, A the rendered avatar, Sb the extra
// frontal-view lexicon exemplar. Only the humans S1..S3 ever appear in a
// test set.
enum class SignerTag : uint8_t { S1, S2, S3, A, Sb };

constexpr SignerTag kAllSigners[] = {SignerTag::S1, SignerTag::S2, SignerTag::S3, SignerTag::A,
                                     SignerTag::Sb};
constexpr SignerTag kHumanTestSigners[] = {SignerTag::S1, SignerTag::S2, SignerTag::S3};

constexpr bool is_human(SignerTag s) { return s != SignerTag::A; }
constexpr bool is_test_eligible(SignerTag s) {
  return s == SignerTag::S1 || s == SignerTag::S2 || s == SignerTag::S3;
}

const char* to_string(SignerTag s);
std::optional<SignerTag> parse_signer(const std::string& s);

// ---- views ----------------------------------------------------------------

enum class View : uint8_t { Left, Front, Right };

constexpr View kAllViews[] = {View::Left, View::Front, View::Right};

constexpr int azimuth_deg(View v) {
  return v == View::Left ? -25 : (v == View::Right ? 25 : 0);
}

// single-letter code used in clip ids and CLI flags ('l', 'f', 'r')
char view_code(View v);
const char* to_string(View v);  // "left" / "front" / "right"
std::optional<View> parse_view(const std::string& s);
std::optional<View> parse_view_code(char c);

// ---- vocabulary -------------------------------------------------------------

enum class Handedness : uint8_t { One, TwoSym, TwoAsym };

const char* to_string(Handedness h);
std::optional<Handedness> parse_handedness(const std::string& s);

struct GlossEntry {
  int gloss_id = 0;
  std::string label;
  Handedness handedness = Handedness::One;
  std::string strong_handshape;
  std::optional<std::string> weak_handshape;  // present iff two-handed
};

// ---- pose data ---------------------------------------------------------------

// One sign clip: T x 75 x 3 raster of normalized image coordinates.
// Landmark layout: [0,33) full-body pose (0-10 face region, 11-32 body),
// [33,54) left hand, [54,75) right hand. A failed extraction is stored as
// the exact triple (0,0,0).
struct PoseSequence {
  static constexpr size_t kLandmarks = 75;
  static constexpr size_t kChannels = 3;

  std::vector<float> frames;  // T * 75 * 3, row-major (frame, landmark, coord)
  SignerTag signer = SignerTag::S1;
  View view = View::Front;
  int gloss_id = 0;
  double fps = 25.0;

  size_t frame_count() const { return frames.size() / (kLandmarks * kChannels); }
  float at(size_t t, size_t lm, size_t c) const {
    return frames[(t * kLandmarks + lm) * kChannels + c];
  }
  float& at(size_t t, size_t lm, size_t c) {
    return frames[(t * kLandmarks + lm) * kChannels + c];
  }
};

// Validates finiteness and the T >= 1 / 75-landmark contract; returns a
// description of the first problem, or nullopt when fine.
std::optional<std::string> check_pose_sequence(const PoseSequence& seq);

// ---- manifest -----------------------------------------------------------------

struct ManifestEntry {
  std::string clip_id;  // "{gloss_id}_{signer}_{view_code}"
  std::string path;     // pose file, relative to the manifest
  SignerTag signer = SignerTag::S1;
  View view = View::Front;
  int gloss_id = 0;
};

struct DatasetManifest {
  std::vector<GlossEntry> vocabulary;
  std::vector<ManifestEntry> entries;
};

std::string clip_identifier(int gloss_id, SignerTag signer, View view);

struct Violation {
  std::string where;  // clip id or vocabulary slot
  std::string rule;
  std::string detail;
};

// Empty result iff the manifest honours all invariants: unique
// (signer, view, gloss) triples, known gloss ids, unique gloss ids,
// weak handshape present exactly for two-handed signs, well-formed clip ids.
std::vector<Violation> validate_manifest(const DatasetManifest& manifest);

// JSON sidecar (schema: {version: 1, vocabulary: [...], entries: [...]}).
// load throws IoError when unreadable and FormatError when malformed.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

}  // namespace geomsign
