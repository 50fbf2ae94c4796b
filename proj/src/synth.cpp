#include "geomsign/synth.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "geomsign/errors.hpp"
#include "geomsign/graph.hpp"
#include "geomsign/pose_io.hpp"

namespace geomsign {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// canonical skeleton, meters, torso at origin, y up; left side on +x
std::array<std::array<double, 3>, 27> canonical_pose() {
  std::array<std::array<double, 3>, 27> p{};
  p[0] = {0.0, 0.42, 0.0};     // nose
  p[1] = {0.20, 0.28, 0.0};    // left shoulder
  p[2] = {-0.20, 0.28, 0.0};   // right shoulder
  p[3] = {0.33, 0.05, 0.06};   // left elbow
  p[4] = {-0.33, 0.05, 0.06};  // right elbow
  p[5] = {0.28, -0.06, 0.22};  // left wrist
  p[6] = {-0.28, -0.06, 0.22}; // right wrist
  // hand fans relative to the body wrist; mirrored in x for the right hand
  const double hx[10] = {0.01, 0.08, 0.03, 0.05, 0.01, 0.02, -0.01, -0.02, -0.04, -0.06};
  const double hy[10] = {0.00, 0.03, 0.08, 0.16, 0.09, 0.18, 0.08, 0.16, 0.07, 0.13};
  const double hz[10] = {0.01, 0.04, 0.03, 0.05, 0.04, 0.06, 0.03, 0.05, 0.03, 0.04};
  for (int i = 0; i < 10; ++i) {
    p[7 + i] = {p[5][0] + hx[i], p[5][1] + hy[i], p[5][2] + hz[i]};
    p[17 + i] = {p[6][0] - hx[i], p[6][1] + hy[i], p[6][2] + hz[i]};
  }
  return p;
}
}  // namespace

std::vector<std::array<double, 3>> project(const std::vector<std::array<double, 3>>& points,
                                           double azimuth_deg, const CameraRig& rig) {
  const double th = -azimuth_deg * (kTwoPi / 360.0);
  const double c = std::cos(th), s = std::sin(th);
  std::vector<std::array<double, 3>> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const double x = c * p[0] + s * p[2];
    const double z = -s * p[0] + c * p[2];
    const double depth = rig.distance_m - z;
    if (depth <= 1e-9)
      throw std::domain_error("project: point at or behind the camera plane");
    out.push_back({rig.image_center[0] + rig.focal * x / depth,
                   rig.image_center[1] + rig.focal * (-p[1]) / depth, depth});
  }
  return out;
}

MotionTemplate make_template(int gloss_id, Rng rng) {
  MotionTemplate t;
  t.gloss_id = gloss_id;
  t.base_pose = canonical_pose();
  for (int n = 0; n < 27; ++n) {
    const bool hand = n >= 7;
    const bool arm = n >= 3 && n < 7;
    // class identity lives mostly in the hands and arms; the trunk barely moves
    for (int axis = 0; axis < 3; ++axis) {
      const int n_harm = hand ? 2 : 1;
      for (int h = 0; h < n_harm; ++h) {
        Harmonic hm;
        if (hand)
          hm.amplitude = rng.uniform(0.05, 0.20);
        else if (arm)
          hm.amplitude = rng.uniform(0.02, 0.10);
        else
          hm.amplitude = rng.uniform(0.005, 0.02);
        if (axis == 1) hm.amplitude *= 0.8;  // slightly flatter vertical motion
        hm.frequency = rng.uniform(0.4, 2.2);
        hm.phase = rng.uniform(0.0, kTwoPi);
        t.harmonics[n][axis].push_back(hm);
      }
    }
  }
  return t;
}

SignerStyle make_style(Rng rng) {
  SignerStyle s;
  s.amplitude_scale = rng.uniform(0.8, 1.2);
  s.phase_offset = rng.uniform(0.0, kTwoPi);
  s.translation = {rng.uniform(-0.30, 0.30), rng.uniform(-0.12, 0.12),
                   rng.uniform(-0.30, 0.30)};
  return s;
}

std::vector<std::array<double, 3>> motion_frame(const MotionTemplate& tmpl,
                                                const SignerStyle& style, double t_seconds) {
  std::vector<std::array<double, 3>> out(27);
  for (int n = 0; n < 27; ++n)
    for (int axis = 0; axis < 3; ++axis) {
      double v = tmpl.base_pose[n][axis] + style.translation[axis];
      for (const auto& h : tmpl.harmonics[n][axis])
        v += h.amplitude * style.amplitude_scale *
             std::sin(kTwoPi * h.frequency * t_seconds + h.phase + style.phase_offset);
      out[n][axis] = v;
    }
  return out;
}

PoseSequence render_clip(const MotionTemplate& tmpl, const SignerStyle& style, View view,
                         const CameraRig& rig, int frames, double fps) {
  if (frames < 1) throw std::invalid_argument("render_clip: need at least one frame");
  const NodeMap map = default_node_map();
  PoseSequence seq;
  seq.gloss_id = tmpl.gloss_id;
  seq.view = view;
  seq.fps = fps;
  seq.frames.assign(static_cast<size_t>(frames) * PoseSequence::kLandmarks * 3, 0.0f);
  const double az = azimuth_deg(view);
  for (int f = 0; f < frames; ++f) {
    const auto world = motion_frame(tmpl, style, f / fps);
    const auto img = project(world, az, rig);
    for (size_t k = 0; k < kGraphNodes; ++k) {
      const auto lm = static_cast<size_t>(map.indices[k]);
      for (size_t c = 0; c < 3; ++c)
        seq.at(static_cast<size_t>(f), lm, c) = static_cast<float>(img[k][c]);
    }
  }
  return seq;
}

DatasetManifest generate_dataset(const SynthConfig& config, const std::string& out_dir) {
  if (config.n_classes < 2) throw std::invalid_argument("generate_dataset: n_classes >= 2");
  if (config.n_signers < 2 || config.n_signers > 4)
    throw std::invalid_argument("generate_dataset: n_signers must be in [2, 4]");
  std::filesystem::create_directories(out_dir);

  const Rng root(config.seed);
  DatasetManifest manifest;

  const char* const shapes[] = {"fist", "flat", "index", "spread", "pinch", "hook"};
  for (int c = 0; c < config.n_classes; ++c) {
    GlossEntry g;
    g.gloss_id = c;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sign_%03d", c);
    g.label = buf;
    g.handedness = c % 2 == 0 ? Handedness::One
                              : (c % 4 == 1 ? Handedness::TwoSym : Handedness::TwoAsym);
    g.strong_handshape = shapes[c % 6];
    if (g.handedness != Handedness::One) g.weak_handshape = shapes[(c + 3) % 6];
    manifest.vocabulary.push_back(std::move(g));
  }

  std::vector<SignerTag> signers(kAllSigners, kAllSigners + config.n_signers);
  if (config.with_signbank) signers.push_back(SignerTag::Sb);

  for (int c = 0; c < config.n_classes; ++c) {
    const MotionTemplate tmpl =
        make_template(c, root.fork("class-" + std::to_string(c)));
    for (SignerTag signer : signers) {
      const SignerStyle style =
          make_style(root.fork(std::string("signer-") + to_string(signer)));
      const bool front_only = signer == SignerTag::Sb;
      for (double az : config.rig.azimuths_deg) {
        View view = az < 0 ? View::Left : (az > 0 ? View::Right : View::Front);
        if (front_only && view != View::Front) continue;
        PoseSequence seq =
            render_clip(tmpl, style, view, config.rig, config.frames_per_clip, config.fps);
        seq.signer = signer;
        const std::string id = clip_identifier(c, signer, view);
        const std::string file = id + ".ngtp";
        save_pose_file((std::filesystem::path(out_dir) / file).string(), seq);
        manifest.entries.push_back({id, file, signer, view, c});
      }
    }
  }
  save_manifest(manifest, (std::filesystem::path(out_dir) / "manifest.json").string());
  return manifest;
}

}  // namespace geomsign
