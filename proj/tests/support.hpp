#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "rlfc/encoder.hpp"
#include "rlfc/lightfield.hpp"

namespace rlfc::test {

inline const LightFieldGrid& synthetic_lf() {
  static const LightFieldGrid lf = synthesize_lightfield(SyntheticSpec{});
  return lf;
}

inline EncodingParams lossless_params() {
  EncodingParams p;
  p.pixel_threshold = 0;
  p.block_threshold = 0;
  p.quant_shift = 0;
  p.root_codec = RootCodec::Raw;
  return p;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rlfc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed);
  return gen;
}

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

}  // namespace rlfc::test
