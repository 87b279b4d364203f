#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "rlfc/plane.hpp"

namespace rlfc {

/// World-space rectangle on the image plane covered by the (u, v) pixel grid.
struct ImageRect {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 1.0;
  double height = 1.0;
};

/// Light-slab geometry: rays run between two planes parallel to z = const.
/// World axes: x to the right, y down (image row order), z into the scene.
struct PlaneGeometry {
  double camera_plane_z = 0.0;
  double image_plane_z = 4.0;
  ImageRect image_plane_extent;

  void validate() const;

  /// Geometry used when a manifest or stream carries none: a pixel pitch of
  /// 1/4 world unit, image plane 4 units away, centred over the camera grid.
  static PlaneGeometry centered(const std::vector<Eigen::Vector2d>& positions, int width, int height);
};

/// The (s, t) camera plane sampling. Image index is t * s_count + s.
struct CameraGrid {
  int s_count = 0;
  int t_count = 0;
  std::vector<Eigen::Vector2d> positions;
  PlaneGeometry geometry;

  int index(int s, int t) const { return t * s_count + s; }
  int count() const { return s_count * t_count; }

  /// Throws std::out_of_range for an index outside the grid.
  const Eigen::Vector2d& position(int s, int t) const;

  /// Mean camera x of column s / mean camera y of row t; these drive the
  /// inverse (world -> fractional grid) mapping used by the renderer.
  double column_x(int s) const;
  double row_y(int t) const;

  void validate() const;

  /// Camera positions at the integer grid coordinates.
  static CameraGrid uniform(int s_count, int t_count, int width, int height);
};

/// S x T grid of W x H 8-bit RGB views.
struct LightFieldGrid {
  CameraGrid cameras;
  int width = 0;
  int height = 0;
  std::vector<RgbImage> images;

  int s_count() const { return cameras.s_count; }
  int t_count() const { return cameras.t_count; }
  const RgbImage& image(int s, int t) const { return images.at(cameras.index(s, t)); }
  RgbImage& image(int s, int t) { return images.at(cameras.index(s, t)); }

  void validate() const;
  bool same_pixels(const LightFieldGrid& other) const;
};

const Eigen::Vector2d& camera_position(const LightFieldGrid& grid, int s, int t);

struct SyntheticSpec {
  int s_count = 8;
  int t_count = 8;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 7;
};

/// Procedural light field: a textured background plane behind a textured
/// occluder, seen from a regular camera grid. Pure function of `spec`.
LightFieldGrid synthesize_lightfield(const SyntheticSpec& spec);

// Manifest: one JSON document.
// {
//   "grid": {"s": S, "t": T},
//   "bit_depth": 8,
//   "geometry": {"camera_plane_z": z, "image_plane_z": z,
//                "image_plane_extent": {"x0":, "y0":, "width":, "height":}},
//   "images": [{"s":, "t":, "path": "relative/or/absolute.png", "position": [x, y]}, ...]
// }
// geometry and position are optional.
LightFieldGrid load_manifest(const std::filesystem::path& path);

/// Writes one PNG per view plus manifest.json into `dir`.
void save_manifest(const LightFieldGrid& grid, const std::filesystem::path& dir);

}  // namespace rlfc
