#pragma once

#include <cstddef>
#include <vector>

#include "rlfc/plane.hpp"

namespace rlfc {

struct AncestorNode {
  int level = 0;
  int x = 0;
  int y = 0;
  int bfs = 0;  // serial index in the SRV tree
};

struct AncestorChain {
  std::vector<AncestorNode> nodes;  // level h-1 first, own level-0 node last
  int root_x = 0;
  int root_y = 0;
};

/// Shape of an encoded light field: camera grid, image size, tree height and
/// block tiling. Level l of the tree is a ceil(S/2^l) x ceil(T/2^l) grid; RKV
/// levels run 0..h, SRV levels 0..h-1.
struct StreamLayout {
  int s_count = 0;
  int t_count = 0;
  int width = 0;
  int height = 0;
  int tree_height = 1;
  int block_size = 4;

  int padded_width() const { return ceil_div(width, block_size) * block_size; }
  int padded_height() const { return ceil_div(height, block_size) * block_size; }
  int blocks_x() const { return ceil_div(width, block_size); }
  int blocks_y() const { return ceil_div(height, block_size); }
  int block_count() const { return blocks_x() * blocks_y(); }
  int block_values() const { return block_size * block_size; }

  GridDims level_dims(int level) const;
  GridDims root_dims() const { return level_dims(tree_height); }

  /// Total SRV node count over levels 0..h-1.
  int srv_node_count() const;
  std::size_t bitmap_bytes() const { return (static_cast<std::size_t>(srv_node_count()) + 7) / 8; }

  /// Level-order serial index: level h-1 first, row-major within a level.
  /// Throws std::out_of_range for coordinates outside the SRV tree.
  int bfs_index(int level, int x, int y) const;

  /// Throws std::out_of_range when (s, t) is outside the camera grid.
  AncestorChain ancestors(ImageIndex image) const;

  void validate() const;
};

}  // namespace rlfc
