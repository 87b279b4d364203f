#include "rlfc/layout.hpp"

#include <stdexcept>
#include <string>

#include "rlfc/errors.hpp"

namespace rlfc {

GridDims StreamLayout::level_dims(int level) const {
  const int scale = 1 << level;
  return {ceil_div(s_count, scale), ceil_div(t_count, scale)};
}

int StreamLayout::srv_node_count() const {
  int total = 0;
  for (int l = 0; l < tree_height; ++l) total += level_dims(l).count();
  return total;
}

int StreamLayout::bfs_index(int level, int x, int y) const {
  if (level < 0 || level >= tree_height) {
    throw std::out_of_range("SRV level " + std::to_string(level) + " outside 0.." + std::to_string(tree_height - 1));
  }
  const GridDims dims = level_dims(level);
  if (x < 0 || y < 0 || x >= dims.x || y >= dims.y) {
    throw std::out_of_range("SRV node (" + std::to_string(x) + "," + std::to_string(y) + ") outside level " +
                            std::to_string(level));
  }
  int index = 0;
  for (int l = tree_height - 1; l > level; --l) index += level_dims(l).count();
  return index + y * dims.x + x;
}

AncestorChain StreamLayout::ancestors(ImageIndex image) const {
  if (image.s < 0 || image.t < 0 || image.s >= s_count || image.t >= t_count) {
    throw std::out_of_range("image (" + std::to_string(image.s) + "," + std::to_string(image.t) +
                            ") outside the camera grid");
  }
  AncestorChain chain;
  chain.nodes.reserve(static_cast<std::size_t>(tree_height));
  int base = 0;
  for (int l = tree_height - 1; l >= 0; --l) {
    const GridDims dims = level_dims(l);
    const int x = image.s >> l;
    const int y = image.t >> l;
    chain.nodes.push_back({l, x, y, base + y * dims.x + x});
    base += dims.count();
  }
  chain.root_x = image.s >> tree_height;
  chain.root_y = image.t >> tree_height;
  return chain;
}

void StreamLayout::validate() const {
  if (s_count < 1 || t_count < 1) throw FormatError("camera grid must be at least 1x1");
  if (width < 1 || height < 1) throw FormatError("image dimensions must be positive");
  if (tree_height < 1 || tree_height > 15) throw FormatError("tree height must be in 1..15");
  if (block_size != 2 && block_size != 4 && block_size != 8 && block_size != 16) {
    throw FormatError("block size must be 2, 4, 8 or 16");
  }
}

}  // namespace rlfc
