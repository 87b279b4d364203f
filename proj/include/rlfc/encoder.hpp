#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rlfc/hierarchy.hpp"
#include "rlfc/lightfield.hpp"

namespace rlfc {

struct EncodeReport {
  double bpp = 0.0;
  std::array<double, kChannelCount> channel_bpp{};  // channel section bits / pixels; header counted in bpp only
  std::vector<int> present_blocks_per_level;         // summed over channels, index = level
  std::array<std::size_t, kChannelCount> root_bytes{};
  std::size_t stream_bytes = 0;
  double encode_seconds = 0.0;
};

struct EncodeResult {
  std::vector<std::uint8_t> stream;
  EncodeReport report;
  std::vector<ViewPlanes> reconstructed;  // Y/Co/Cg level-0 planes the decoder will produce
};

/// YCoCg-R -> RKV tree -> closed-loop SRV tree -> serialized stream.
EncodeResult compress(const LightFieldGrid& lf, const EncodingParams& params);

std::vector<ViewPlanes> to_ycocg_views(const LightFieldGrid& lf);

}  // namespace rlfc
