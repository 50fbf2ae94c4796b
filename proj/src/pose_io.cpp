#include "geomsign/pose_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "geomsign/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "pose file I/O assumes a little-endian host");

namespace geomsign {

namespace {
constexpr char kMagic[4] = {'N', 'G', 'T', 'P'};

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_u32(std::ostream& out, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
}  // namespace

PoseSequence load_pose_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pose file '" + path + "'");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a pose file: '" + path + "'");

  const uint32_t version = read_u32(in);
  const uint32_t t = read_u32(in);
  const uint32_t n_lm = read_u32(in);
  const uint32_t c = read_u32(in);
  if (!in) throw FormatError("truncated file: '" + path + "' (incomplete header)");
  if (version != kPoseFileVersion)
    throw FormatError("unsupported pose file version " + std::to_string(version) + " in '" +
                      path + "'");
  if (n_lm != PoseSequence::kLandmarks)
    throw FormatError("unsupported landmark count " + std::to_string(n_lm) + " in '" + path +
                      "' (expected 75)");
  if (c != PoseSequence::kChannels)
    throw FormatError("unsupported channel count " + std::to_string(c) + " in '" + path + "'");
  if (t == 0) throw FormatError("pose file '" + path + "' has zero frames");

  PoseSequence seq;
  const size_t n = static_cast<size_t>(t) * n_lm * c;
  seq.frames.resize(n);
  in.read(reinterpret_cast<char*>(seq.frames.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != n * sizeof(float))
    throw FormatError("truncated file: '" + path + "' (payload shorter than header dims)");
  // trailing bytes beyond the declared dims are also a dims/payload mismatch
  char extra;
  if (in.read(&extra, 1))
    throw FormatError("truncated file: '" + path + "' (payload longer than header dims)");

  if (const auto problem = check_pose_sequence(seq))
    throw FormatError("pose file '" + path + "': " + *problem);
  return seq;
}

void save_pose_file(const std::string& path, const PoseSequence& seq) {
  if (const auto problem = check_pose_sequence(seq))
    throw std::invalid_argument("refusing to write invalid pose sequence: " + *problem);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write pose file '" + path + "'");
  out.write(kMagic, 4);
  write_u32(out, kPoseFileVersion);
  write_u32(out, static_cast<uint32_t>(seq.frame_count()));
  write_u32(out, PoseSequence::kLandmarks);
  write_u32(out, PoseSequence::kChannels);
  out.write(reinterpret_cast<const char*>(seq.frames.data()),
            static_cast<std::streamsize>(seq.frames.size() * sizeof(float)));
  if (!out) throw IoError("error while writing pose file '" + path + "'");
}

}  // namespace geomsign
