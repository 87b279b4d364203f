#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rlfc/bise.hpp"
#include "rlfc/hierarchy.hpp"
#include "rlfc/layout.hpp"
#include "rlfc/plane.hpp"

namespace rlfc {

// .rlfc stream
//
//   header (64 bytes)
//   for channel in Y, Co, Cg:
//     root stream    : per root RKV, row-major: u32 length | codec bytes
//     block offsets  : u64 per block location, relative to the SRV stream
//     SRV stream     : one record per block location, row-major
//
// record = presence bitmap (ceil(M/8) bytes, bit i <-> BFS node i, LSB first)
//          then per present node in BFS order: descriptor u8 | BISE payload
//
// All integers are little endian. Header layout:
//   0  "RLFC"            4  u8 version        5  u8 tree height
//   6  u8 block size     7  u8 quant shift    8  u16 S        10 u16 T
//   12 u32 W             16 u32 H             20 u32 pixel threshold
//   24 u32 block thresh  28 u8 filter kind    29 u8 root codec
//   30 u16 sigma (1/256) 32 u64 x3 channel section lengths
//   56 reserved (zero)

inline constexpr std::size_t kHeaderSize = 64;
inline constexpr std::uint8_t kFormatVersion = 1;

struct RlfcHeader {
  int s_count = 0;
  int t_count = 0;
  int width = 0;
  int height = 0;
  int tree_height = 0;
  int block_size = 0;
  int quant_shift = 0;
  int pixel_threshold = 0;
  int block_threshold = 0;
  FilterSpec filter;
  RootCodec root_codec = RootCodec::Png;
  std::array<std::uint64_t, kChannelCount> section_lengths{};

  StreamLayout layout() const;
  EncodingParams params() const;

  std::array<std::uint8_t, kHeaderSize> to_bytes() const;
  bool operator==(const RlfcHeader&) const = default;
};

/// Throws FormatError on short input, bad magic, unknown version or
/// inconsistent fields.
RlfcHeader parse_header(std::span<const std::uint8_t> bytes);

/// Lossless single-plane codecs for root RKVs. Samples are unsigned 16-bit.
std::vector<std::uint8_t> encode_root(const Plane16& plane, RootCodec codec);
Plane16 decode_root(std::span<const std::uint8_t> bytes, RootCodec codec, int width, int height);

bool root_codec_available(RootCodec codec);

/// Root RKVs per channel, row-major over the root grid, signed Y/Co/Cg.
using RootPlanes = std::array<std::vector<PlaneI>, kChannelCount>;

std::vector<std::uint8_t> serialize(const RootPlanes& roots, const SrvTree& srv, const EncodingParams& params);

/// Byte ranges of the three parts of one channel section, relative to the
/// start of the whole stream.
struct ChannelSection {
  std::size_t root_begin = 0;
  std::size_t root_end = 0;
  std::size_t offsets_begin = 0;
  std::size_t srv_begin = 0;
  std::size_t srv_end = 0;
};

struct StreamIndex {
  RlfcHeader header;
  std::array<ChannelSection, kChannelCount> sections;
  std::array<std::vector<std::uint64_t>, kChannelCount> offsets;
  std::array<std::vector<std::span<const std::uint8_t>>, kChannelCount> root_payloads;
};

/// Splits a stream into its sections and reads the offset arrays.
StreamIndex index_stream(std::span<const std::uint8_t> bytes);

struct NodeLocation {
  bool present = false;
  RangeDescriptor range;
  std::size_t begin = 0;  // payload byte range within the record
  std::size_t end = 0;
};

/// Finds the payload of BFS node `node_index` inside one block record by
/// skipping the descriptors of the present nodes before it.
NodeLocation locate_in_record(std::span<const std::uint8_t> record, const StreamLayout& layout, int node_index);

/// Record bytes for one block location of one channel.
std::span<const std::uint8_t> block_record(std::span<const std::uint8_t> stream, const StreamIndex& index,
                                           int channel, int block_index);

NodeLocation locate_block(std::span<const std::uint8_t> stream, const StreamIndex& index, int channel,
                          int block_index, int node_index);

struct ParsedStream {
  RlfcHeader header;
  RootPlanes roots;
  SrvTree srv;
};

/// Full parse back into roots and SRV tree; inverse of serialize.
ParsedStream deserialize(std::span<const std::uint8_t> bytes);

}  // namespace rlfc
