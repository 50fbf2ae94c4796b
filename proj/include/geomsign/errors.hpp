#pragma once

#include <stdexcept>
#include <string>

namespace geomsign {

// File missing/unreadable. Distinct from content-level validation problems.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// File exists but its bytes are not what they claim to be (bad magic,
// truncated payload, malformed JSON).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// A request that cannot be satisfied by the given dataset (missing clip,
// unknown gloss, empty split).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf surfaced by a tensor operation; message names the op.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace geomsign
