#include "rlfc/decoder.hpp"

#include <algorithm>
#include <string>

#include "rlfc/bise.hpp"
#include "rlfc/colorspace.hpp"
#include "rlfc/errors.hpp"

namespace rlfc {
namespace {

void check_request(const DecoderState& state, ImageIndex image, BlockIndex block, int channel, int stop_level) {
  const StreamLayout& layout = state.layout();
  if (image.s < 0 || image.t < 0 || image.s >= layout.s_count || image.t >= layout.t_count) {
    throw UsageError("image index out of range");
  }
  if (block.bx < 0 || block.by < 0 || block.bx >= layout.blocks_x() || block.by >= layout.blocks_y()) {
    throw UsageError("block index out of range");
  }
  if (channel < 0 || channel >= kChannelCount) throw UsageError("channel out of range");
  if (stop_level < 0 || stop_level > layout.tree_height) throw UsageError("progressive level out of range");
}

PlaneI root_block(const DecoderState& state, const AncestorChain& chain, BlockIndex block, int channel) {
  const StreamLayout& layout = state.layout();
  const int b = layout.block_size;
  PlaneI out = PlaneI::Zero(b, b);
  const int x0 = block.bx * b;
  const int y0 = block.by * b;
  const int w = std::min(b, layout.width - x0);
  const int h = std::min(b, layout.height - y0);
  out.topLeftCorner(h, w) = state.root(channel, chain.root_x, chain.root_y).block(y0, x0, h, w);
  return out;
}

void add_payload(PlaneI& acc, std::span<const std::uint8_t> payload, const RangeDescriptor& range, int shift,
                 std::span<std::uint32_t> scratch) {
  bise_decode(payload, range, scratch);
  const int b = static_cast<int>(acc.cols());
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    acc(static_cast<int>(i) / b, static_cast<int>(i) % b) += dequantize(unzigzag(scratch[i]), shift);
  }
}

bool bit_set(std::span<const std::uint8_t> bitmap, int i) {
  return (bitmap[static_cast<std::size_t>(i) >> 3] >> (i & 7)) & 1u;
}

}  // namespace

DecoderState DecoderState::init(std::vector<std::uint8_t> stream) {
  DecoderState state;
  state.bytes_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(stream));
  state.index_ = index_stream(*state.bytes_);
  state.layout_ = state.index_.header.layout();
  const RootCodec codec = state.index_.header.root_codec;
  for (int c = 0; c < kChannelCount; ++c) {
    for (const auto payload : state.index_.root_payloads[c]) {
      const Plane16 samples = decode_root(payload, codec, state.layout_.width, state.layout_.height);
      state.roots_[c].push_back(samples.cast<std::int32_t>() - root_bias(c));
    }
  }
  return state;
}

std::span<const std::uint8_t> DecoderState::record(int channel, int block_index) const {
  return block_record(*bytes_, index_, channel, block_index);
}

std::size_t DecoderState::record_offset(int channel, int block_index) const {
  return index_.sections[channel].srv_begin + index_.offsets[channel][static_cast<std::size_t>(block_index)];
}

bool DecoderState::operator==(const DecoderState& other) const {
  if (!(index_.header == other.index_.header) || index_.offsets != other.index_.offsets) return false;
  for (int c = 0; c < kChannelCount; ++c) {
    if (roots_[c].size() != other.roots_[c].size()) return false;
    for (std::size_t i = 0; i < roots_[c].size(); ++i) {
      if ((roots_[c][i] != other.roots_[c][i]).any()) return false;
    }
  }
  return *bytes_ == *other.bytes_;
}

PlaneI decode_block_progressive(const DecoderState& state, ImageIndex image, BlockIndex block, int channel,
                                int stop_level, AccessLog* log) {
  check_request(state, image, block, channel, stop_level);
  const StreamLayout& layout = state.layout();
  const AncestorChain chain = layout.ancestors(image);
  PlaneI acc = root_block(state, chain, block, channel);
  if (stop_level >= layout.tree_height) return acc;

  const int block_index = block.by * layout.blocks_x() + block.bx;
  const auto record = state.record(channel, block_index);
  const std::size_t bitmap = layout.bitmap_bytes();
  if (record.size() < bitmap) throw FormatError("block record shorter than its presence bitmap");
  const std::size_t n_values = static_cast<std::size_t>(layout.block_values());
  const int shift = state.header().quant_shift;
  std::uint32_t scratch_storage[16 * 16];
  const std::span<std::uint32_t> scratch(scratch_storage, n_values);

  // Chain nodes are in ascending BFS order, so one forward scan of the
  // record reaches every payload we need.
  std::size_t pos = bitmap;
  std::size_t touched = bitmap;
  int scanned = 0;
  for (const AncestorNode& node : chain.nodes) {
    if (node.level < stop_level) break;
    if (!bit_set(record, node.bfs)) {
      continue;
    }
    for (; scanned < node.bfs; ++scanned) {
      if (!bit_set(record, scanned)) continue;
      if (pos >= record.size()) throw FormatError("block record truncated");
      pos += 1 + payload_bytes(range_from_index(record[pos]), n_values);
    }
    if (pos >= record.size()) throw FormatError("block record truncated");
    const RangeDescriptor range = range_from_index(record[pos]);
    const std::size_t len = payload_bytes(range, n_values);
    if (pos + 1 + len > record.size()) throw FormatError("block payload runs past its record");
    add_payload(acc, record.subspan(pos + 1, len), range, shift, scratch);
    pos += 1 + len;
    scanned = node.bfs + 1;
    touched = pos;
  }
  if (log) {
    const std::size_t begin = state.record_offset(channel, block_index);
    log->reads.push_back({channel, block_index, begin, begin + touched});
  }
  return acc;
}

PlaneI decode_block(const DecoderState& state, ImageIndex image, BlockIndex block, int channel, AccessLog* log) {
  return decode_block_progressive(state, image, block, channel, 0, log);
}

ViewPlanes decode_image_planes(const DecoderState& state, ImageIndex image, int stop_level) {
  const StreamLayout& layout = state.layout();
  const int b = layout.block_size;
  ViewPlanes out;
  for (int c = 0; c < kChannelCount; ++c) {
    PlaneI padded(layout.padded_height(), layout.padded_width());
    for (int by = 0; by < layout.blocks_y(); ++by) {
      for (int bx = 0; bx < layout.blocks_x(); ++bx) {
        padded.block(by * b, bx * b, b, b) = decode_block_progressive(state, image, {bx, by}, c, stop_level);
      }
    }
    out[c] = padded.topLeftCorner(layout.height, layout.width);
  }
  return out;
}

RgbImage decode_image(const DecoderState& state, ImageIndex image) {
  return ycocgr_to_rgb8(decode_image_planes(state, image));
}

std::vector<ViewPlanes> decode_all_planes(const DecoderState& state) {
  const StreamLayout& layout = state.layout();
  const int b = layout.block_size;
  const int n_nodes = layout.srv_node_count();
  const std::size_t n_values = static_cast<std::size_t>(layout.block_values());
  const int shift = state.header().quant_shift;

  std::vector<AncestorChain> chains;
  for (int t = 0; t < layout.t_count; ++t) {
    for (int s = 0; s < layout.s_count; ++s) chains.push_back(layout.ancestors({s, t}));
  }
  std::vector<ViewPlanes> views(chains.size());
  for (auto& v : views) {
    for (auto& p : v) p = PlaneI::Zero(layout.padded_height(), layout.padded_width());
  }

  std::vector<PlaneI> residual(static_cast<std::size_t>(n_nodes));
  std::vector<std::uint8_t> present(static_cast<std::size_t>(n_nodes));
  std::vector<std::uint32_t> scratch(n_values);
  for (int c = 0; c < kChannelCount; ++c) {
    for (int by = 0; by < layout.blocks_y(); ++by) {
      for (int bx = 0; bx < layout.blocks_x(); ++bx) {
        const int block_index = by * layout.blocks_x() + bx;
        const auto record = state.record(c, block_index);
        if (record.size() < layout.bitmap_bytes()) throw FormatError("block record shorter than its presence bitmap");
        std::size_t pos = layout.bitmap_bytes();
        for (int node = 0; node < n_nodes; ++node) {
          present[node] = bit_set(record, node);
          if (!present[node]) continue;
          if (pos >= record.size()) throw FormatError("block record truncated");
          const RangeDescriptor range = range_from_index(record[pos]);
          const std::size_t len = payload_bytes(range, n_values);
          if (pos + 1 + len > record.size()) throw FormatError("block payload runs past its record");
          residual[node] = PlaneI::Zero(b, b);
          add_payload(residual[node], record.subspan(pos + 1, len), range, shift, scratch);
          pos += 1 + len;
        }
        for (std::size_t v = 0; v < chains.size(); ++v) {
          PlaneI acc = root_block(state, chains[v], {bx, by}, c);
          for (const auto& node : chains[v].nodes) {
            if (present[node.bfs]) acc += residual[node.bfs];
          }
          views[v][c].block(by * b, bx * b, b, b) = acc;
        }
      }
    }
  }
  for (auto& v : views) {
    for (auto& p : v) p = p.topLeftCorner(layout.height, layout.width).eval();
  }
  return views;
}

CameraGrid default_cameras(const RlfcHeader& header) {
  return CameraGrid::uniform(header.s_count, header.t_count, header.width, header.height);
}

LightFieldGrid decode_all(const DecoderState& state, const CameraGrid* cameras) {
  const RlfcHeader& header = state.header();
  LightFieldGrid lf;
  if (cameras) {
    if (cameras->s_count != header.s_count || cameras->t_count != header.t_count) {
      throw VerificationError("camera grid does not match the stream");
    }
    lf.cameras = *cameras;
  } else {
    lf.cameras = default_cameras(header);
  }
  lf.width = header.width;
  lf.height = header.height;
  for (const auto& view : decode_all_planes(state)) lf.images.push_back(ycocgr_to_rgb8(view));
  return lf;
}

}  // namespace rlfc
