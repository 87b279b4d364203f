#include "rlfc/container.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "rlfc/colorspace.hpp"
#include "rlfc/errors.hpp"
#include "rlfc/image_io.hpp"

namespace rlfc {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'R', 'L', 'F', 'C'};

template <typename T>
void put_le(std::uint8_t* dst, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i));
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t buf[sizeof(T)];
  put_le(buf, value);
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T get_le(const std::uint8_t* src) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  return static_cast<T>(v);
}

std::string codec_name(RootCodec codec) {
  return "root codec " + std::to_string(static_cast<int>(codec));
}

bool bit_set(std::span<const std::uint8_t> bitmap, int i) { return (bitmap[static_cast<std::size_t>(i) >> 3] >> (i & 7)) & 1u; }

Plane16 to_root_samples(const PlaneI& plane, int channel) {
  const PlaneI biased = plane + root_bias(channel);
  if (biased.size() > 0 && (biased.minCoeff() < 0 || biased.maxCoeff() > 0xFFFF)) {
    throw Error("root RKV sample outside the 16-bit codec range");
  }
  return biased.cast<std::uint16_t>();
}

}  // namespace

StreamLayout RlfcHeader::layout() const {
  return {s_count, t_count, width, height, tree_height, block_size};
}

EncodingParams RlfcHeader::params() const {
  EncodingParams p;
  p.tree_height = tree_height;
  p.block_size = block_size;
  p.pixel_threshold = pixel_threshold;
  p.block_threshold = block_threshold;
  p.quant_shift = quant_shift;
  p.filter = filter;
  p.root_codec = root_codec;
  return p;
}

std::array<std::uint8_t, kHeaderSize> RlfcHeader::to_bytes() const {
  std::array<std::uint8_t, kHeaderSize> b{};
  std::memcpy(b.data(), kMagic.data(), kMagic.size());
  b[4] = kFormatVersion;
  b[5] = static_cast<std::uint8_t>(tree_height);
  b[6] = static_cast<std::uint8_t>(block_size);
  b[7] = static_cast<std::uint8_t>(quant_shift);
  put_le<std::uint16_t>(&b[8], static_cast<std::uint16_t>(s_count));
  put_le<std::uint16_t>(&b[10], static_cast<std::uint16_t>(t_count));
  put_le<std::uint32_t>(&b[12], static_cast<std::uint32_t>(width));
  put_le<std::uint32_t>(&b[16], static_cast<std::uint32_t>(height));
  put_le<std::uint32_t>(&b[20], static_cast<std::uint32_t>(pixel_threshold));
  put_le<std::uint32_t>(&b[24], static_cast<std::uint32_t>(block_threshold));
  b[28] = static_cast<std::uint8_t>(filter.kind);
  b[29] = static_cast<std::uint8_t>(root_codec);
  put_le<std::uint16_t>(&b[30], static_cast<std::uint16_t>(filter.sigma_q));
  for (int c = 0; c < kChannelCount; ++c) put_le<std::uint64_t>(&b[32 + 8 * c], section_lengths[c]);
  return b;
}

RlfcHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("stream shorter than the 64-byte header");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) throw FormatError("bad magic, not an RLFC stream");
  if (bytes[4] != kFormatVersion) throw FormatError("unsupported RLFC version " + std::to_string(bytes[4]));
  RlfcHeader h;
  h.tree_height = bytes[5];
  h.block_size = bytes[6];
  h.quant_shift = bytes[7];
  h.s_count = get_le<std::uint16_t>(&bytes[8]);
  h.t_count = get_le<std::uint16_t>(&bytes[10]);
  h.width = static_cast<int>(get_le<std::uint32_t>(&bytes[12]));
  h.height = static_cast<int>(get_le<std::uint32_t>(&bytes[16]));
  h.pixel_threshold = static_cast<int>(get_le<std::uint32_t>(&bytes[20]));
  h.block_threshold = static_cast<int>(get_le<std::uint32_t>(&bytes[24]));
  if (bytes[28] > 1) throw FormatError("unknown filter kind " + std::to_string(bytes[28]));
  h.filter.kind = static_cast<FilterKind>(bytes[28]);
  if (bytes[29] > 2) throw FormatError("unsupported root codec " + std::to_string(bytes[29]));
  h.root_codec = static_cast<RootCodec>(bytes[29]);
  h.filter.sigma_q = get_le<std::uint16_t>(&bytes[30]);
  for (int c = 0; c < kChannelCount; ++c) h.section_lengths[c] = get_le<std::uint64_t>(&bytes[32 + 8 * c]);
  for (std::size_t i = 56; i < kHeaderSize; ++i) {
    if (bytes[i] != 0) throw FormatError("reserved header bytes must be zero");
  }
  if (h.quant_shift > 8) throw FormatError("quantization shift out of range");
  if (h.width <= 0 || h.height <= 0) throw FormatError("image dimensions out of range");
  h.layout().validate();
  return h;
}

bool root_codec_available(RootCodec codec) { return codec == RootCodec::Raw || codec == RootCodec::Png; }

std::vector<std::uint8_t> encode_root(const Plane16& plane, RootCodec codec) {
  switch (codec) {
    case RootCodec::Raw: {
      std::vector<std::uint8_t> out;
      out.reserve(static_cast<std::size_t>(plane.size()) * 2);
      for (Eigen::Index y = 0; y < plane.rows(); ++y) {
        for (Eigen::Index x = 0; x < plane.cols(); ++x) append_le<std::uint16_t>(out, plane(y, x));
      }
      return out;
    }
    case RootCodec::Png:
      return encode_png_gray(plane);
    case RootCodec::Jpeg2000:
      throw FormatError(codec_name(codec) + " (JPEG2000) is not available in this build");
  }
  throw FormatError("unsupported " + codec_name(codec));
}

Plane16 decode_root(std::span<const std::uint8_t> bytes, RootCodec codec, int width, int height) {
  Plane16 out;
  switch (codec) {
    case RootCodec::Raw: {
      const std::size_t need = static_cast<std::size_t>(width) * height * 2;
      if (bytes.size() != need) throw FormatError("RAW root plane has wrong size");
      out.resize(height, width);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) out(y, x) = get_le<std::uint16_t>(&bytes[(static_cast<std::size_t>(y) * width + x) * 2]);
      }
      return out;
    }
    case RootCodec::Png:
      out = decode_png_gray(bytes);
      if (out.cols() != width || out.rows() != height) throw FormatError("root plane does not match header dims");
      return out;
    case RootCodec::Jpeg2000:
      throw FormatError(codec_name(codec) + " (JPEG2000) is not available in this build");
  }
  throw FormatError("unsupported " + codec_name(codec));
}

std::vector<std::uint8_t> serialize(const RootPlanes& roots, const SrvTree& srv, const EncodingParams& params) {
  params.validate();
  const StreamLayout& layout = srv.layout;
  layout.validate();
  if (layout.tree_height != params.tree_height || layout.block_size != params.block_size ||
      static_cast<int>(srv.levels.size()) != layout.tree_height) {
    throw Error("serialize: SRV tree does not match the encoding parameters");
  }
  const int root_count = layout.root_dims().count();
  const int n_values = layout.block_values();
  const int b = layout.block_size;

  RlfcHeader header;
  header.s_count = layout.s_count;
  header.t_count = layout.t_count;
  header.width = layout.width;
  header.height = layout.height;
  header.tree_height = layout.tree_height;
  header.block_size = layout.block_size;
  header.quant_shift = params.quant_shift;
  header.pixel_threshold = params.pixel_threshold;
  header.block_threshold = params.block_threshold;
  header.filter = params.filter;
  header.root_codec = params.root_codec;

  std::vector<std::uint8_t> out(kHeaderSize, 0);
  std::vector<std::uint32_t> values(static_cast<std::size_t>(n_values));
  for (int c = 0; c < kChannelCount; ++c) {
    const std::size_t section_start = out.size();
    if (static_cast<int>(roots[c].size()) != root_count) throw Error("serialize: wrong number of root planes");
    for (const auto& root : roots[c]) {
      if (root.cols() != layout.width || root.rows() != layout.height) throw Error("serialize: root plane dims");
      const auto payload = encode_root(to_root_samples(root, c), params.root_codec);
      append_le<std::uint32_t>(out, static_cast<std::uint32_t>(payload.size()));
      out.insert(out.end(), payload.begin(), payload.end());
    }

    const std::size_t offsets_at = out.size();
    out.resize(out.size() + 8 * static_cast<std::size_t>(layout.block_count()), 0);
    const std::size_t srv_start = out.size();

    for (int by = 0; by < layout.blocks_y(); ++by) {
      for (int bx = 0; bx < layout.blocks_x(); ++bx) {
        const int block = by * layout.blocks_x() + bx;
        put_le<std::uint64_t>(&out[offsets_at + 8 * static_cast<std::size_t>(block)], out.size() - srv_start);
        const std::size_t bitmap_at = out.size();
        out.resize(out.size() + layout.bitmap_bytes(), 0);
        int node = 0;
        for (int l = layout.tree_height - 1; l >= 0; --l) {
          const SrvLevel& level = srv.levels[static_cast<std::size_t>(l)];
          for (int y = 0; y < level.dims.y; ++y) {
            for (int x = 0; x < level.dims.x; ++x, ++node) {
              const SrvChannel& ch = level.node(x, y).channels[c];
              if (!ch.present[static_cast<std::size_t>(block)]) continue;
              out[bitmap_at + (static_cast<std::size_t>(node) >> 3)] |= static_cast<std::uint8_t>(1u << (node & 7));
              const auto q = ch.quantized.block(by * b, bx * b, b, b);
              std::uint32_t max_value = 0;
              for (int i = 0; i < n_values; ++i) {
                values[i] = zigzag(q(i / b, i % b));
                max_value = std::max(max_value, values[i]);
              }
              const RangeDescriptor range = select_range(max_value);
              out.push_back(static_cast<std::uint8_t>(range.table_index));
              bise_encode_into(values, range, out);
            }
          }
        }
      }
    }
    header.section_lengths[c] = out.size() - section_start;
  }
  const auto head = header.to_bytes();
  std::copy(head.begin(), head.end(), out.begin());
  return out;
}

StreamIndex index_stream(std::span<const std::uint8_t> bytes) {
  StreamIndex index;
  index.header = parse_header(bytes);
  const StreamLayout layout = index.header.layout();
  std::uint64_t expected = kHeaderSize;
  for (auto len : index.header.section_lengths) expected += len;
  if (expected != bytes.size()) {
    throw FormatError("stream length " + std::to_string(bytes.size()) + " does not match header (" +
                      std::to_string(expected) + ")");
  }
  const int root_count = layout.root_dims().count();
  const std::size_t n_blocks = static_cast<std::size_t>(layout.block_count());
  std::size_t pos = kHeaderSize;
  for (int c = 0; c < kChannelCount; ++c) {
    ChannelSection& sec = index.sections[c];
    const std::size_t section_end = pos + index.header.section_lengths[c];
    sec.root_begin = pos;
    for (int r = 0; r < root_count; ++r) {
      if (pos + 4 > section_end) throw FormatError("root stream truncated");
      const std::size_t len = get_le<std::uint32_t>(&bytes[pos]);
      pos += 4;
      if (len > section_end - pos) throw FormatError("root stream truncated");
      index.root_payloads[c].push_back(bytes.subspan(pos, len));
      pos += len;
    }
    sec.root_end = pos;
    sec.offsets_begin = pos;
    if (n_blocks * 8 > section_end - pos) throw FormatError("block offset array truncated");
    auto& offsets = index.offsets[c];
    offsets.resize(n_blocks);
    for (std::size_t i = 0; i < n_blocks; ++i) offsets[i] = get_le<std::uint64_t>(&bytes[pos + 8 * i]);
    pos += n_blocks * 8;
    sec.srv_begin = pos;
    sec.srv_end = section_end;
    const std::uint64_t srv_len = section_end - pos;
    for (std::size_t i = 0; i < n_blocks; ++i) {
      const std::uint64_t next = i + 1 < n_blocks ? offsets[i + 1] : srv_len;
      if (offsets[i] >= next || next > srv_len || (i == 0 && offsets[0] != 0)) {
        throw FormatError("block offset " + std::to_string(i) + " points past the section end or is out of order");
      }
    }
    pos = section_end;
  }
  return index;
}

NodeLocation locate_in_record(std::span<const std::uint8_t> record, const StreamLayout& layout, int node_index) {
  const std::size_t bitmap = layout.bitmap_bytes();
  if (record.size() < bitmap) throw FormatError("block record shorter than its presence bitmap");
  if (node_index < 0 || node_index >= layout.srv_node_count()) throw FormatError("node index outside the SRV tree");
  NodeLocation loc;
  if (!bit_set(record, node_index)) return loc;
  const std::size_t n_values = static_cast<std::size_t>(layout.block_values());
  std::size_t pos = bitmap;
  // Walk the set bits below node_index a byte at a time.
  for (int byte = 0; byte <= (node_index >> 3); ++byte) {
    unsigned bits = record[static_cast<std::size_t>(byte)];
    if (byte == (node_index >> 3)) bits &= (1u << (node_index & 7)) - 1u;
    for (; bits != 0; bits &= bits - 1) {
      if (pos >= record.size()) throw FormatError("block record truncated");
      pos += 1 + payload_bytes(range_from_index(record[pos]), n_values);
    }
  }
  if (pos >= record.size()) throw FormatError("block record truncated");
  loc.present = true;
  loc.range = range_from_index(record[pos]);
  loc.begin = pos + 1;
  loc.end = loc.begin + payload_bytes(loc.range, n_values);
  if (loc.end > record.size()) throw FormatError("block payload runs past its record");
  return loc;
}

std::span<const std::uint8_t> block_record(std::span<const std::uint8_t> stream, const StreamIndex& index,
                                           int channel, int block_index) {
  const auto& offsets = index.offsets[channel];
  const ChannelSection& sec = index.sections[channel];
  if (block_index < 0 || static_cast<std::size_t>(block_index) >= offsets.size()) {
    throw FormatError("block index out of range");
  }
  const std::size_t begin = sec.srv_begin + offsets[static_cast<std::size_t>(block_index)];
  const std::size_t end = static_cast<std::size_t>(block_index) + 1 < offsets.size()
                              ? sec.srv_begin + offsets[static_cast<std::size_t>(block_index) + 1]
                              : sec.srv_end;
  return stream.subspan(begin, end - begin);
}

NodeLocation locate_block(std::span<const std::uint8_t> stream, const StreamIndex& index, int channel,
                          int block_index, int node_index) {
  return locate_in_record(block_record(stream, index, channel, block_index), index.header.layout(), node_index);
}

ParsedStream deserialize(std::span<const std::uint8_t> bytes) {
  const StreamIndex index = index_stream(bytes);
  ParsedStream parsed;
  parsed.header = index.header;
  const StreamLayout layout = index.header.layout();
  const int b = layout.block_size;
  const std::size_t n_values = static_cast<std::size_t>(layout.block_values());

  for (int c = 0; c < kChannelCount; ++c) {
    for (const auto payload : index.root_payloads[c]) {
      const Plane16 samples = decode_root(payload, index.header.root_codec, layout.width, layout.height);
      parsed.roots[c].push_back(samples.cast<std::int32_t>() - root_bias(c));
    }
  }

  SrvTree& srv = parsed.srv;
  srv.layout = layout;
  srv.levels.resize(static_cast<std::size_t>(layout.tree_height));
  for (int l = 0; l < layout.tree_height; ++l) {
    SrvLevel& level = srv.levels[static_cast<std::size_t>(l)];
    level.dims = layout.level_dims(l);
    level.nodes.resize(static_cast<std::size_t>(level.dims.count()));
    for (auto& node : level.nodes) {
      for (auto& ch : node.channels) {
        ch.quantized = Plane<std::int16_t>::Zero(layout.padded_height(), layout.padded_width());
        ch.present.assign(static_cast<std::size_t>(layout.block_count()), 0);
      }
    }
  }

  std::vector<std::uint32_t> values(n_values);
  for (int c = 0; c < kChannelCount; ++c) {
    for (int block = 0; block < layout.block_count(); ++block) {
      const auto record = block_record(bytes, index, c, block);
      if (record.size() < layout.bitmap_bytes()) throw FormatError("block record shorter than its presence bitmap");
      const int bx = block % layout.blocks_x();
      const int by = block / layout.blocks_x();
      std::size_t pos = layout.bitmap_bytes();
      int node = 0;
      for (int l = layout.tree_height - 1; l >= 0; --l) {
        SrvLevel& level = srv.levels[static_cast<std::size_t>(l)];
        for (int y = 0; y < level.dims.y; ++y) {
          for (int x = 0; x < level.dims.x; ++x, ++node) {
            if (!bit_set(record, node)) continue;
            if (pos >= record.size()) throw FormatError("block record truncated");
            const RangeDescriptor range = range_from_index(record[pos]);
            const std::size_t len = payload_bytes(range, n_values);
            if (pos + 1 + len > record.size()) throw FormatError("block payload runs past its record");
            bise_decode(record.subspan(pos + 1, len), range, values);
            pos += 1 + len;
            SrvChannel& ch = level.node(x, y).channels[c];
            ch.present[static_cast<std::size_t>(block)] = 1;
            for (std::size_t i = 0; i < n_values; ++i) {
              ch.quantized(by * b + static_cast<int>(i) / b, bx * b + static_cast<int>(i) % b) =
                  static_cast<std::int16_t>(unzigzag(values[i]));
            }
          }
        }
      }
      if (pos != record.size()) throw FormatError("trailing bytes in block record " + std::to_string(block));
    }
  }
  return parsed;
}

}  // namespace rlfc
