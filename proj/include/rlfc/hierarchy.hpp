#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rlfc/layout.hpp"
#include "rlfc/plane.hpp"

namespace rlfc {

enum class FilterKind : std::uint8_t { Uniform = 0, Gaussian = 1 };

enum class RootCodec : std::uint8_t { Raw = 0, Png = 1, Jpeg2000 = 2 };

inline constexpr int kWeightDenominator = 256;

struct FilterSpec {
  FilterKind kind = FilterKind::Gaussian;
  int sigma_q = 179;  // width in camera-grid units, 1/256 steps (0.7 -> 179)

  double sigma() const { return sigma_q / 256.0; }

  bool operator==(const FilterSpec&) const = default;
};

struct EncodingParams {
  int tree_height = 3;
  int cluster_factor = 2;
  int block_size = 4;
  int pixel_threshold = 4;
  int block_threshold = 80;
  int quant_shift = 2;
  FilterSpec filter;
  RootCodec root_codec = RootCodec::Png;

  /// Throws UsageError on an invalid combination.
  void validate() const;
};

/// Regular 2x2 tiling of one level onto the next.
struct ClusterMap {
  GridDims child_dims;
  GridDims parent_dims;

  GridDims parent_of(int x, int y) const { return {x / 2, y / 2}; }
  /// Children of a parent cell in row-major order; 1, 2 or 4 entries.
  std::vector<GridDims> children_of(int px, int py) const;
};

ClusterMap cluster_level(GridDims level_dims);

/// Fixed-point filter weights for one cluster, summing to exactly 256.
/// Gaussian weights fall off with distance from the cluster centroid and are
/// normalized by largest remainder (ties go to the lower index).
std::vector<int> cluster_weights(std::span<const Eigen::Vector2d> positions, const FilterSpec& spec);

/// Per pixel: floor((sum w_i * child_i + 128) / 256).
PlaneI filter_cluster(std::span<const PlaneI* const> children, std::span<const int> weights);
PlaneI filter_cluster(std::span<const PlaneI* const> children, std::span<const Eigen::Vector2d> positions,
                      const FilterSpec& spec);

struct RkvNode {
  ViewPlanes channels;  // Y, Co, Cg
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct RkvLevel {
  GridDims dims;
  std::vector<RkvNode> nodes;  // row-major

  const RkvNode& node(int x, int y) const { return nodes[static_cast<std::size_t>(y) * dims.x + x]; }
  RkvNode& node(int x, int y) { return nodes[static_cast<std::size_t>(y) * dims.x + x]; }
};

struct RkvTree {
  std::vector<RkvLevel> levels;  // 0..h

  int height() const { return static_cast<int>(levels.size()) - 1; }
  const RkvLevel& top() const { return levels.back(); }
};

/// `views` are level-0 Y/Co/Cg planes in image-index order (t * S + s).
RkvTree build_rkv_tree(const std::vector<ViewPlanes>& views, std::span<const Eigen::Vector2d> positions,
                       GridDims grid, const EncodingParams& params);

/// child - parent, per pixel. Throws on a dimension mismatch.
PlaneI compute_srv(const PlaneI& child, const PlaneI& parent);

/// One channel of one SRV node: quantized residuals on the padded grid plus a
/// presence flag per block (row-major). Absent blocks hold zeros.
struct SrvChannel {
  Plane<std::int16_t> quantized;
  std::vector<std::uint8_t> present;

  int block_present_count() const;
};

struct QuantizedResidual {
  SrvChannel channel;
  PlaneI reconstructed;  // dequantized residual, true (unpadded) dims
};

/// Quantizer step for one sample: sign(r) * floor(|r| / 2^s).
constexpr std::int32_t quantize(std::int32_t r, int shift) { return r >= 0 ? (r >> shift) : -((-r) >> shift); }

/// sign(q) * (|q| * 2^s + half), half = 2^(s-1) for s > 0 and q != 0.
constexpr std::int32_t dequantize(std::int32_t q, int shift) {
  if (q == 0) return 0;
  const std::int32_t half = shift > 0 ? (1 << (shift - 1)) : 0;
  const std::int32_t mag = ((q < 0 ? -q : q) << shift) + half;
  return q < 0 ? -mag : mag;
}

/// Pixel threshold, block-energy threshold and quantization of one residual
/// plane. A block is absent when its post-threshold energy is below Tb or
/// when every quantized value in it is zero.
QuantizedResidual threshold_and_quantize(const PlaneI& residual, const EncodingParams& params);

struct SrvNode {
  std::array<SrvChannel, kChannelCount> channels;
};

struct SrvLevel {
  GridDims dims;
  std::vector<SrvNode> nodes;  // row-major

  const SrvNode& node(int x, int y) const { return nodes[static_cast<std::size_t>(y) * dims.x + x]; }
  SrvNode& node(int x, int y) { return nodes[static_cast<std::size_t>(y) * dims.x + x]; }
};

struct SrvTree {
  StreamLayout layout;
  std::vector<SrvLevel> levels;  // 0..h-1

  int present_blocks(int level) const;
  int present_blocks() const;
};

struct SrvBuildResult {
  SrvTree tree;
  std::vector<ViewPlanes> reconstructed;  // level-0 views as any decoder will see them
};

/// Closed-loop top-down pass: each node's residual is taken against the
/// reconstructed parent, and the node is itself replaced by
/// parent + dequantized residual before its children are visited.
SrvBuildResult build_srv_tree(const RkvTree& tree, const StreamLayout& layout, const EncodingParams& params);

}  // namespace rlfc
