#include <cmath>

#include "doctest.h"

#include "rlfc/colorspace.hpp"
#include "rlfc/decoder.hpp"
#include "rlfc/encoder.hpp"
#include "rlfc/errors.hpp"
#include "rlfc/metrics.hpp"
#include "support.hpp"

using namespace rlfc;

namespace {

EncodingParams lossy(int tb = 80, int b = 4, int s = 2, int h = 3) {
  EncodingParams p;
  p.block_threshold = tb;
  p.block_size = b;
  p.quant_shift = s;
  p.tree_height = h;
  return p;
}

const DecoderState& default_state() {
  static const DecoderState state = DecoderState::init(compress(test::synthetic_lf(), lossy()).stream);
  return state;
}

}  // namespace

TEST_CASE("lossless configuration is bit exact") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const EncodeResult r = compress(lf, test::lossless_params());
  const DecoderState state = DecoderState::init(r.stream);
  CHECK(decode_all(state).same_pixels(lf));
}

TEST_CASE("lossless on an odd-sized grid with partial blocks") {
  const LightFieldGrid lf = synthesize_lightfield({3, 5, 30, 22, 11});
  for (int b : {2, 4, 8, 16}) {
    for (int h : {1, 2, 4}) {
      EncodingParams p = test::lossless_params();
      p.block_size = b;
      p.tree_height = h;
      const DecoderState state = DecoderState::init(compress(lf, p).stream);
      REQUIRE(decode_all(state).same_pixels(lf));
    }
  }
}

TEST_CASE("encoder reconstruction equals decoder output") {
  const LightFieldGrid& lf = test::synthetic_lf();
  for (const auto& p : {lossy(), lossy(0, 2, 0, 2), lossy(150, 8, 4, 3), lossy(20, 4, 1, 1)}) {
    const EncodeResult r = compress(lf, p);
    const auto decoded = decode_all_planes(DecoderState::init(r.stream));
    REQUIRE(decoded.size() == r.reconstructed.size());
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      for (int c = 0; c < kChannelCount; ++c) REQUIRE((decoded[i][c] == r.reconstructed[i][c]).all());
    }
  }
}

TEST_CASE("random access agrees with whole-image decode") {
  const DecoderState& state = default_state();
  const StreamLayout& layout = state.layout();
  const auto all = decode_all_planes(state);
  const int b = layout.block_size;
  for (int rep = 0; rep < 40; ++rep) {
    const ImageIndex img{test::uniform_int(0, 7), test::uniform_int(0, 7)};
    const ViewPlanes full = decode_image_planes(state, img);
    const int c = test::uniform_int(0, 2);
    const BlockIndex blk{test::uniform_int(0, layout.blocks_x() - 1), test::uniform_int(0, layout.blocks_y() - 1)};
    const PlaneI block = decode_block(state, img, blk, c);
    REQUIRE((block == full[c].block(blk.by * b, blk.bx * b, b, b)).all());
    REQUIRE((full[c] == all[img.t * 8 + img.s][c]).all());
  }
}

TEST_CASE("one record read per channel") {
  const DecoderState& state = default_state();
  const StreamLayout& layout = state.layout();
  for (int rep = 0; rep < 300; ++rep) {
    const ImageIndex img{test::uniform_int(0, 7), test::uniform_int(0, 7)};
    const BlockIndex blk{test::uniform_int(0, layout.blocks_x() - 1), test::uniform_int(0, layout.blocks_y() - 1)};
    const int c = test::uniform_int(0, 2);
    AccessLog log;
    decode_block(state, img, blk, c, &log);
    REQUIRE(log.reads.size() == 1);
    const SrvRead& read = log.reads[0];
    const int index = blk.by * layout.blocks_x() + blk.bx;
    const auto record = state.record(c, index);
    REQUIRE(read.channel == c);
    REQUIRE(read.block_index == index);
    REQUIRE(read.begin == state.record_offset(c, index));
    REQUIRE(read.end <= read.begin + record.size());
    REQUIRE(read.end >= read.begin + layout.bitmap_bytes());
  }
}

TEST_CASE("progressive decode") {
  const DecoderState& state = default_state();
  const StreamLayout& layout = state.layout();
  const ImageIndex img{5, 2};
  for (int by = 0; by < layout.blocks_y(); by += 3) {
    for (int bx = 0; bx < layout.blocks_x(); bx += 3) {
      for (int c = 0; c < kChannelCount; ++c) {
        REQUIRE((decode_block_progressive(state, img, {bx, by}, c, 0) == decode_block(state, img, {bx, by}, c)).all());
        const AncestorChain chain = layout.ancestors(img);
        const PlaneI root = state.root(c, chain.root_x, chain.root_y).block(by * 4, bx * 4, 4, 4);
        REQUIRE((decode_block_progressive(state, img, {bx, by}, c, layout.tree_height) == root).all());
      }
    }
  }
  CHECK_THROWS_AS(decode_block_progressive(state, img, {0, 0}, 0, 4), UsageError);
  CHECK_THROWS_AS(decode_block(state, {8, 0}, {0, 0}, 0), UsageError);
  CHECK_THROWS_AS(decode_block(state, img, {16, 0}, 0), UsageError);
  CHECK_THROWS_AS(decode_block(state, img, {0, 0}, 3), UsageError);
}

TEST_CASE("progressive error shrinks toward full quality") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const DecoderState& state = default_state();
  const auto reference = to_ycocg_views(lf);
  double previous = INFINITY;
  for (int k = state.layout().tree_height; k >= 0; --k) {
    double mae = 0;
    for (int i = 0; i < 64; ++i) {
      const ViewPlanes v = decode_image_planes(state, {i % 8, i / 8}, k);
      for (int c = 0; c < kChannelCount; ++c) mae += (v[c] - reference[i][c]).abs().cast<double>().mean();
    }
    CHECK(mae <= previous);
    previous = mae;
  }
}

TEST_CASE("bpp falls as the block threshold rises") {
  const LightFieldGrid& lf = test::synthetic_lf();
  double previous = INFINITY;
  for (int tb : {0, 50, 150}) {
    const EncodeResult r = compress(lf, lossy(tb));
    CHECK(r.report.bpp <= previous);
    CHECK(r.report.bpp == doctest::Approx(8.0 * r.stream.size() / (64.0 * 64 * 64)));
    previous = r.report.bpp;
  }
}

TEST_CASE("encode report") {
  const EncodeResult r = compress(test::synthetic_lf(), lossy());
  CHECK(r.report.stream_bytes == r.stream.size());
  CHECK(r.report.present_blocks_per_level.size() == 3);
  double channel_sum = 0;
  for (double v : r.report.channel_bpp) channel_sum += v;
  CHECK(channel_sum < r.report.bpp);
  CHECK(channel_sum + 8.0 * 64 / (64.0 * 64 * 64) == doctest::Approx(r.report.bpp));
}

TEST_CASE("quality at the reference setting") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const QualityReport q = psnr_ycocg(lf, decode_all(DecoderState::init(compress(lf, lossy(50)).stream)));
  CHECK(q.psnr_ycocg >= 35.0);
}

TEST_CASE("damaged streams") {
  auto bytes = compress(test::synthetic_lf(), lossy()).stream;
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK_THROWS_AS(DecoderState::init(truncated), FormatError);
  CHECK_THROWS_AS(DecoderState::init({}), FormatError);

  const DecoderState state = DecoderState::init(bytes);
  const CameraGrid wrong = CameraGrid::uniform(4, 8, 64, 64);
  CHECK_THROWS_AS(decode_all(state, &wrong), VerificationError);
  CHECK(state == DecoderState::init(bytes));
}

TEST_CASE("unavailable root codec") {
  EncodingParams p = lossy();
  p.root_codec = RootCodec::Jpeg2000;
  CHECK_THROWS_AS(compress(test::synthetic_lf(), p), FormatError);
}
