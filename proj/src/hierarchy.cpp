#include "rlfc/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rlfc/bise.hpp"
#include "rlfc/errors.hpp"

namespace rlfc {

void EncodingParams::validate() const {
  if (tree_height < 1 || tree_height > 15) throw UsageError("tree height must be in 1..15");
  if (cluster_factor != 2) throw UsageError("only 2x2 clustering is supported");
  if (block_size != 2 && block_size != 4 && block_size != 8 && block_size != 16) {
    throw UsageError("block size must be one of 2, 4, 8, 16");
  }
  if (pixel_threshold < 0 || block_threshold < 0) throw UsageError("thresholds must be non-negative");
  if (quant_shift < 0 || quant_shift > 8) throw UsageError("quantization shift must be in 0..8");
  if (filter.kind == FilterKind::Gaussian && (filter.sigma_q < 1 || filter.sigma_q > 0xFFFF)) {
    throw UsageError("gaussian sigma must be in (0, 256) grid units");
  }
  if (root_codec != RootCodec::Raw && root_codec != RootCodec::Png && root_codec != RootCodec::Jpeg2000) {
    throw UsageError("unknown root codec");
  }
}

std::vector<GridDims> ClusterMap::children_of(int px, int py) const {
  std::vector<GridDims> out;
  for (int y = 2 * py; y < std::min(2 * py + 2, child_dims.y); ++y) {
    for (int x = 2 * px; x < std::min(2 * px + 2, child_dims.x); ++x) out.push_back({x, y});
  }
  return out;
}

ClusterMap cluster_level(GridDims level_dims) {
  return {level_dims, {ceil_div(level_dims.x, 2), ceil_div(level_dims.y, 2)}};
}

std::vector<int> cluster_weights(std::span<const Eigen::Vector2d> positions, const FilterSpec& spec) {
  const std::size_t n = positions.size();
  if (n == 0) throw Error("cluster has no members");
  std::vector<double> raw(n, 1.0);
  if (spec.kind == FilterKind::Gaussian) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : positions) centroid += p;
    centroid /= static_cast<double>(n);
    const double two_sigma_sq = 2.0 * spec.sigma() * spec.sigma();
    for (std::size_t i = 0; i < n; ++i) raw[i] = std::exp(-(positions[i] - centroid).squaredNorm() / two_sigma_sq);
  }
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<int> weights(n);
  std::vector<double> remainder(n);
  int assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = kWeightDenominator * raw[i] / total;
    weights[i] = static_cast<int>(std::floor(exact));
    remainder[i] = exact - weights[i];
    assigned += weights[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (int k = 0; k < kWeightDenominator - assigned; ++k) ++weights[order[static_cast<std::size_t>(k) % n]];
  return weights;
}

PlaneI filter_cluster(std::span<const PlaneI* const> children, std::span<const int> weights) {
  if (children.empty() || children.size() != weights.size()) throw Error("filter_cluster: bad cluster");
  PlaneI acc = PlaneI::Constant(children[0]->rows(), children[0]->cols(), kWeightDenominator / 2);
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (children[i]->rows() != acc.rows() || children[i]->cols() != acc.cols()) {
      throw Error("filter_cluster: children differ in size");
    }
    acc += weights[i] * *children[i];
  }
  return acc.unaryExpr([](std::int32_t v) { return v >> 8; });
}

PlaneI filter_cluster(std::span<const PlaneI* const> children, std::span<const Eigen::Vector2d> positions,
                      const FilterSpec& spec) {
  const auto weights = cluster_weights(positions, spec);
  return filter_cluster(children, weights);
}

RkvTree build_rkv_tree(const std::vector<ViewPlanes>& views, std::span<const Eigen::Vector2d> positions,
                       GridDims grid, const EncodingParams& params) {
  params.validate();
  if (static_cast<int>(views.size()) != grid.count() || positions.size() != views.size()) {
    throw Error("build_rkv_tree: view count does not match grid");
  }
  RkvTree tree;
  tree.levels.reserve(static_cast<std::size_t>(params.tree_height) + 1);
  RkvLevel base{grid, {}};
  base.nodes.reserve(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) base.nodes.push_back({views[i], positions[i]});
  tree.levels.push_back(std::move(base));

  for (int l = 1; l <= params.tree_height; ++l) {
    const RkvLevel& below = tree.levels.back();
    const ClusterMap clusters = cluster_level(below.dims);
    RkvLevel level{clusters.parent_dims, {}};
    level.nodes.reserve(static_cast<std::size_t>(clusters.parent_dims.count()));
    for (int py = 0; py < clusters.parent_dims.y; ++py) {
      for (int px = 0; px < clusters.parent_dims.x; ++px) {
        const auto members = clusters.children_of(px, py);
        std::vector<Eigen::Vector2d> member_pos;
        for (const auto& m : members) member_pos.push_back(below.node(m.x, m.y).position);
        const auto weights = cluster_weights(member_pos, params.filter);

        RkvNode node;
        node.position = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < members.size(); ++i) node.position += weights[i] * member_pos[i];
        node.position /= kWeightDenominator;
        for (int c = 0; c < kChannelCount; ++c) {
          std::vector<const PlaneI*> planes;
          for (const auto& m : members) planes.push_back(&below.node(m.x, m.y).channels[c]);
          node.channels[c] = filter_cluster(planes, weights);
        }
        level.nodes.push_back(std::move(node));
      }
    }
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

PlaneI compute_srv(const PlaneI& child, const PlaneI& parent) {
  if (child.rows() != parent.rows() || child.cols() != parent.cols()) {
    throw Error("compute_srv: dimension mismatch");
  }
  return child - parent;
}

int SrvChannel::block_present_count() const {
  return static_cast<int>(std::count(present.begin(), present.end(), std::uint8_t{1}));
}

QuantizedResidual threshold_and_quantize(const PlaneI& residual, const EncodingParams& params) {
  const int b = params.block_size;
  const int w = static_cast<int>(residual.cols());
  const int h = static_cast<int>(residual.rows());
  const int bx_count = ceil_div(w, b);
  const int by_count = ceil_div(h, b);

  PlaneI padded = PlaneI::Zero(by_count * b, bx_count * b);
  padded.topLeftCorner(h, w) = (residual.abs() < params.pixel_threshold).select(0, residual);

  QuantizedResidual out;
  out.channel.quantized = Plane<std::int16_t>::Zero(padded.rows(), padded.cols());
  out.channel.present.assign(static_cast<std::size_t>(bx_count) * by_count, 0);
  PlaneI recon = PlaneI::Zero(padded.rows(), padded.cols());

  for (int by = 0; by < by_count; ++by) {
    for (int bx = 0; bx < bx_count; ++bx) {
      const auto block = padded.block(by * b, bx * b, b, b);
      const std::int64_t energy = block.abs().cast<std::int64_t>().sum();
      if (energy == 0 || energy < params.block_threshold) continue;
      const PlaneI q = block.unaryExpr([&](std::int32_t r) { return quantize(r, params.quant_shift); });
      if ((q == 0).all()) continue;
      if (q.abs().maxCoeff() > 1023) throw Error("quantized residual exceeds the BISE value range");
      out.channel.present[static_cast<std::size_t>(by) * bx_count + bx] = 1;
      out.channel.quantized.block(by * b, bx * b, b, b) = q.cast<std::int16_t>();
      recon.block(by * b, bx * b, b, b) = q.unaryExpr([&](std::int32_t v) { return dequantize(v, params.quant_shift); });
    }
  }
  out.reconstructed = recon.topLeftCorner(h, w);
  return out;
}

int SrvTree::present_blocks(int level) const {
  int total = 0;
  for (const auto& node : levels.at(static_cast<std::size_t>(level)).nodes) {
    for (const auto& ch : node.channels) total += ch.block_present_count();
  }
  return total;
}

int SrvTree::present_blocks() const {
  int total = 0;
  for (int l = 0; l < static_cast<int>(levels.size()); ++l) total += present_blocks(l);
  return total;
}

SrvBuildResult build_srv_tree(const RkvTree& tree, const StreamLayout& layout, const EncodingParams& params) {
  const int h = tree.height();
  if (h != params.tree_height || h != layout.tree_height) throw Error("build_srv_tree: tree height mismatch");

  SrvBuildResult result;
  result.tree.layout = layout;
  result.tree.levels.resize(static_cast<std::size_t>(h));

  std::vector<ViewPlanes> parents;
  parents.reserve(tree.top().nodes.size());
  for (const auto& node : tree.top().nodes) parents.push_back(node.channels);

  for (int l = h - 1; l >= 0; --l) {
    const RkvLevel& level = tree.levels[static_cast<std::size_t>(l)];
    const GridDims parent_dims = tree.levels[static_cast<std::size_t>(l) + 1].dims;
    SrvLevel& srv = result.tree.levels[static_cast<std::size_t>(l)];
    srv.dims = level.dims;
    srv.nodes.resize(static_cast<std::size_t>(level.dims.count()));

    std::vector<ViewPlanes> recon(static_cast<std::size_t>(level.dims.count()));
    for (int y = 0; y < level.dims.y; ++y) {
      for (int x = 0; x < level.dims.x; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * level.dims.x + x;
        const ViewPlanes& parent = parents[static_cast<std::size_t>(y / 2) * parent_dims.x + x / 2];
        for (int c = 0; c < kChannelCount; ++c) {
          const PlaneI residual = compute_srv(level.node(x, y).channels[c], parent[c]);
          QuantizedResidual q = threshold_and_quantize(residual, params);
          recon[idx][c] = parent[c] + q.reconstructed;
          srv.nodes[idx].channels[c] = std::move(q.channel);
        }
      }
    }
    parents = std::move(recon);
  }
  result.reconstructed = std::move(parents);
  return result;
}

}  // namespace rlfc
