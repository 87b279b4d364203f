#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "rlfc/colorspace.hpp"
#include "rlfc/decoder.hpp"
#include "rlfc/lightfield.hpp"

namespace rlfc {

/// Pinhole camera. Rays leave `eye` through a window spanning
/// +-half_fov_tan on the unit-distance plane along `look`, offset by
/// `lens_shift` (in half-window units) for off-axis frusta.
struct CameraPose {
  Eigen::Vector3d eye = Eigen::Vector3d::Zero();
  Eigen::Vector3d look = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d up = -Eigen::Vector3d::UnitY();
  Eigen::Vector2d half_fov_tan = Eigen::Vector2d(0.5, 0.5);
  Eigen::Vector2d lens_shift = Eigen::Vector2d::Zero();
  int width = 0;
  int height = 0;

  /// Sheared frustum from `eye` through exactly the image-plane extent, so a
  /// pose at a sample camera reproduces that camera's pixel grid.
  static CameraPose through_extent(const PlaneGeometry& geometry, const Eigen::Vector3d& eye, int width, int height);

  /// Symmetric pose from eye, look direction and vertical field of view.
  static CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& look, double fov_y_degrees, int width,
                            int height);

  void validate(const PlaneGeometry& geometry) const;
};

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;
};

/// Ray through output pixel (x, y); pixel centres sit at +0.5.
Ray pixel_ray(const CameraPose& pose, int x, int y);

/// Fractional (s, t) camera-plane and (u, v) pixel coordinates of a ray.
struct LfCoord {
  double s = 0.0;
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// nullopt when the ray leaves the sampled camera aperture or image extent.
/// Throws Error for a ray parallel to the planes.
std::optional<LfCoord> ray_to_lf_coords(const Ray& ray, const PlaneGeometry& geometry, const CameraGrid& cameras,
                                        int width, int height);

/// Position on the camera plane for fractional grid coordinates.
Eigen::Vector2d camera_plane_point(const CameraGrid& cameras, double s, double t);

/// Per-frame memo of decoded RGB blocks keyed by (image, block) at a fixed
/// progressive level. Not thread safe; use one per worker.
class BlockCache {
 public:
  BlockCache(const DecoderState& state, int stop_level);

  RgbPixel<std::int32_t> pixel(int s, int t, int x, int y);

  std::size_t decodes() const { return decodes_; }
  std::size_t distinct_blocks() const { return blocks_.size(); }
  int stop_level() const { return stop_level_; }
  const StreamLayout& layout() const { return state_.layout(); }

 private:
  const DecoderState& state_;
  int stop_level_;
  std::size_t decodes_ = 0;
  std::unordered_map<std::uint64_t, ViewPlanes> blocks_;  // RGB clamped to [0, 255]
};

/// 16-tap quadrilinear blend over the nearest 2 x 2 cameras and 2 x 2 pixels,
/// clamped to the aperture, rounded half up.
RgbPixel<std::uint8_t> sample_quadrilinear(BlockCache& cache, const CameraGrid& cameras, const LfCoord& c);
RgbPixel<std::uint8_t> sample_quadrilinear(const LightFieldGrid& lf, const LfCoord& c);

struct RenderOptions {
  int stop_level = 0;
  RgbPixel<std::uint8_t> background{0, 0, 0};
  std::optional<double> image_plane_z;  // focal-depth override
};

struct RenderStats {
  std::size_t block_decodes = 0;
  std::size_t outside_pixels = 0;
};

RgbImage render_view(const DecoderState& state, const CameraGrid& cameras, const CameraPose& pose,
                     const RenderOptions& options = {}, RenderStats* stats = nullptr);

/// Reference renderer over a fully decoded grid; ignores stop_level.
RgbImage render_view(const LightFieldGrid& lf, const CameraPose& pose, const RenderOptions& options = {});

}  // namespace rlfc
