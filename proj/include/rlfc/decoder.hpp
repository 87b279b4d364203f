#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rlfc/container.hpp"
#include "rlfc/lightfield.hpp"
#include "rlfc/plane.hpp"

namespace rlfc {

/// One contiguous read from a channel's SRV stream, in absolute stream offsets.
struct SrvRead {
  int channel = 0;
  int block_index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Optional instrumentation for block decodes.
struct AccessLog {
  std::vector<SrvRead> reads;
};

/// Parsed stream with the root RKVs decoded. The SRV stream stays in memory
/// as bytes; every block request decodes only what it needs. Immutable after
/// init, so one state may serve any number of threads.
class DecoderState {
 public:
  /// Throws FormatError on a malformed or truncated stream.
  static DecoderState init(std::vector<std::uint8_t> stream);

  const RlfcHeader& header() const { return index_.header; }
  const StreamLayout& layout() const { return layout_; }
  const StreamIndex& index() const { return index_; }
  std::span<const std::uint8_t> bytes() const { return *bytes_; }

  const PlaneI& root(int channel, int rx, int ry) const {
    return roots_[channel][static_cast<std::size_t>(ry) * layout_.root_dims().x + rx];
  }

  /// Record bytes for one block location of one channel.
  std::span<const std::uint8_t> record(int channel, int block_index) const;
  std::size_t record_offset(int channel, int block_index) const;

  bool operator==(const DecoderState& other) const;

 private:
  std::shared_ptr<const std::vector<std::uint8_t>> bytes_;
  StreamIndex index_;
  StreamLayout layout_;
  RootPlanes roots_;
};

/// Full-quality B x B block of one channel (signed Y/Co/Cg samples).
PlaneI decode_block(const DecoderState& state, ImageIndex image, BlockIndex block, int channel,
                    AccessLog* log = nullptr);

/// Block reconstructed from the root and SRV levels >= stop_level only;
/// stop_level = h gives the root RKV block, 0 equals decode_block.
PlaneI decode_block_progressive(const DecoderState& state, ImageIndex image, BlockIndex block, int channel,
                                int stop_level, AccessLog* log = nullptr);

/// Y/Co/Cg planes of one view, cropped to the true image size.
ViewPlanes decode_image_planes(const DecoderState& state, ImageIndex image, int stop_level = 0);

RgbImage decode_image(const DecoderState& state, ImageIndex image);

/// Every view, decoded one block location at a time: each record is parsed
/// once and shared by all views.
std::vector<ViewPlanes> decode_all_planes(const DecoderState& state);

/// Whole light field. Camera positions and geometry are not stored in the
/// stream; `cameras` supplies them, otherwise the integer grid is used.
LightFieldGrid decode_all(const DecoderState& state, const CameraGrid* cameras = nullptr);

/// Camera grid implied by a stream without side information.
CameraGrid default_cameras(const RlfcHeader& header);

}  // namespace rlfc
