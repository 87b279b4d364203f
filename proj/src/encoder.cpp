#include "rlfc/encoder.hpp"

#include <chrono>

#include "rlfc/colorspace.hpp"
#include "rlfc/container.hpp"
#include "rlfc/errors.hpp"
#include "rlfc/metrics.hpp"

namespace rlfc {

std::vector<ViewPlanes> to_ycocg_views(const LightFieldGrid& lf) {
  std::vector<ViewPlanes> views;
  views.reserve(lf.images.size());
  for (const auto& img : lf.images) views.push_back(rgb_to_ycocgr(img));
  return views;
}

EncodeResult compress(const LightFieldGrid& lf, const EncodingParams& params) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  lf.validate();
  if (lf.s_count() > 0xFFFF || lf.t_count() > 0xFFFF) throw UsageError("camera grid too large for the container");

  const StreamLayout layout{lf.s_count(), lf.t_count(), lf.width, lf.height, params.tree_height, params.block_size};
  const RkvTree rkv = build_rkv_tree(to_ycocg_views(lf), lf.cameras.positions, {lf.s_count(), lf.t_count()}, params);
  SrvBuildResult srv = build_srv_tree(rkv, layout, params);

  RootPlanes roots;
  for (const auto& node : rkv.top().nodes) {
    for (int c = 0; c < kChannelCount; ++c) roots[c].push_back(node.channels[c]);
  }

  EncodeResult result;
  result.stream = serialize(roots, srv.tree, params);
  result.reconstructed = std::move(srv.reconstructed);

  EncodeReport& report = result.report;
  const RlfcHeader header = parse_header(result.stream);
  const double pixels = static_cast<double>(lf.s_count()) * lf.t_count() * lf.width * lf.height;
  report.stream_bytes = result.stream.size();
  report.bpp = bpp(result.stream.size(), lf.s_count(), lf.t_count(), lf.width, lf.height);
  for (int c = 0; c < kChannelCount; ++c) report.channel_bpp[c] = 8.0 * static_cast<double>(header.section_lengths[c]) / pixels;
  for (int l = 0; l < params.tree_height; ++l) report.present_blocks_per_level.push_back(srv.tree.present_blocks(l));
  const StreamIndex index = index_stream(result.stream);
  for (int c = 0; c < kChannelCount; ++c) report.root_bytes[c] = index.sections[c].root_end - index.sections[c].root_begin;
  report.encode_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rlfc
