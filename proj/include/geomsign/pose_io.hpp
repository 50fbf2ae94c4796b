#pragma once

#include <string>
#include <vector>

#include "geomsign/types.hpp"

namespace geomsign {

// .ngtp pose raster: magic "NGTP", u32 version, u32 T, u32 N_lm, u32 C,
// then T*N_lm*C little-endian binary32 values, row-major
// (frame, landmark, coordinate). N_lm must be 75 and C must be 3.
constexpr uint32_t kPoseFileVersion = 1;

// Reads the raster; metadata (signer/view/gloss/fps) is the caller's to fill
// from the manifest entry. Throws IoError when the file cannot be opened,
// FormatError("not a pose file") on bad magic, "truncated file" when the
// payload is shorter than the header claims, and "unsupported landmark
// count" when N_lm != 75.
PoseSequence load_pose_file(const std::string& path);

void save_pose_file(const std::string& path, const PoseSequence& seq);

}  // namespace geomsign
