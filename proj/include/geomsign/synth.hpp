#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geomsign/rng.hpp"
#include "geomsign/types.hpp"

namespace geomsign {

// Camera arc matching the capture rig: three cameras on a horizontal circle
// 4 m from the signer, 25 degrees apart, sharing the signer's torso height.
// Pinhole focal of 1.6 keeps a ~2 m working volume inside the unit image.
struct CameraRig {
  std::vector<double> azimuths_deg{-25.0, 0.0, 25.0};
  double distance_m = 4.0;
  double focal = 1.6;
  std::array<double, 2> image_center{0.5, 0.5};
};

struct Harmonic {
  double amplitude = 0;  // meters
  double frequency = 0;  // Hz
  double phase = 0;      // radians
};

// Per-class motion recipe: a base skeleton plus per-node harmonic motion in
// each world axis. Amplitudes stay <= 0.5 m.
struct MotionTemplate {
  int gloss_id = 0;
  std::array<std::array<double, 3>, 27> base_pose{};
  std::array<std::array<std::vector<Harmonic>, 3>, 27> harmonics{};
};

// Per-signer articulation style applied to every class.
struct SignerStyle {
  double amplitude_scale = 1.0;        // in [0.8, 1.2]
  double phase_offset = 0.0;           // radians
  std::array<double, 3> translation{}; // meters, world frame
};

// World frame: y up, signer torso at the origin, front camera on +z.
// Rotates the scene about the vertical axis by -azimuth, places the camera
// at distance_m on the optical axis and pinhole-projects into normalized
// image coordinates (x right, y down); the third channel is the camera-frame
// depth in meters. Throws std::domain_error for points at or behind the
// camera plane.
std::vector<std::array<double, 3>> project(const std::vector<std::array<double, 3>>& points,
                                           double azimuth_deg, const CameraRig& rig);

MotionTemplate make_template(int gloss_id, Rng rng);
SignerStyle make_style(Rng rng);

// 27 world positions at time t_seconds
std::vector<std::array<double, 3>> motion_frame(const MotionTemplate& tmpl,
                                                const SignerStyle& style, double t_seconds);

// Projected clip padded out to the 75-landmark layout; the 48 unused slots
// stay zero and therefore count as failed keypoints in quality reports.
PoseSequence render_clip(const MotionTemplate& tmpl, const SignerStyle& style, View view,
                         const CameraRig& rig, int frames, double fps);

struct SynthConfig {
  int n_classes = 10;
  int n_signers = 4;  // mapped onto S1, S2, S3, A in order; 2..4 supported
  int frames_per_clip = 32;
  uint64_t seed = 7;
  double fps = 25.0;
  bool with_signbank = false;  // adds one Sb front-view clip per class
  CameraRig rig;
};

// Writes one .ngtp per (class, signer, view) plus manifest.json into
// out_dir and returns the manifest. The seed stream is split per
// (class, signer), so output bytes depend only on the config.
DatasetManifest generate_dataset(const SynthConfig& config, const std::string& out_dir);

}  // namespace geomsign
