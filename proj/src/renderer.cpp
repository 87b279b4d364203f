#include "rlfc/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "rlfc/errors.hpp"

namespace rlfc {
namespace {

constexpr double kSnap = 1e-9;

// Maps a world coordinate onto fractional indices of a strictly increasing
// axis table; nullopt outside [front, back] (with a relative tolerance).
std::optional<double> axis_index(const std::vector<double>& axis, double x) {
  const double span = axis.back() - axis.front();
  const double eps = kSnap * std::max(1.0, std::abs(span)) + kSnap * std::abs(axis.front());
  if (x < axis.front() - eps || x > axis.back() + eps) return std::nullopt;
  if (axis.size() == 1) return 0.0;
  x = std::clamp(x, axis.front(), axis.back());
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  if (i + 1 >= axis.size()) return static_cast<double>(axis.size() - 1);
  return static_cast<double>(i) + (x - axis[i]) / (axis[i + 1] - axis[i]);
}

std::vector<double> column_axis(const CameraGrid& cameras) {
  std::vector<double> a(static_cast<std::size_t>(cameras.s_count));
  for (int s = 0; s < cameras.s_count; ++s) a[s] = cameras.column_x(s);
  return a;
}

std::vector<double> row_axis(const CameraGrid& cameras) {
  std::vector<double> a(static_cast<std::size_t>(cameras.t_count));
  for (int t = 0; t < cameras.t_count; ++t) a[t] = cameras.row_y(t);
  return a;
}

struct AxisTaps {
  int i0 = 0;
  int i1 = 0;
  double w1 = 0.0;  // weight of i1; i0 gets 1 - w1
};

AxisTaps axis_taps(double coord, int count) {
  coord = std::clamp(coord, 0.0, static_cast<double>(count - 1));
  double base = std::floor(coord);
  double frac = coord - base;
  if (frac < kSnap) frac = 0.0;
  if (frac > 1.0 - kSnap) {
    base += 1.0;
    frac = 0.0;
  }
  const int i0 = std::min(static_cast<int>(base), count - 1);
  return {i0, std::min(i0 + 1, count - 1), frac};
}

template <typename Fetch>
RgbPixel<std::uint8_t> blend_quadrilinear(const LfCoord& c, int s_count, int t_count, int width, int height,
                                          Fetch&& fetch) {
  const AxisTaps ts = axis_taps(c.s, s_count);
  const AxisTaps tt = axis_taps(c.t, t_count);
  const AxisTaps tu = axis_taps(c.u, width);
  const AxisTaps tv = axis_taps(c.v, height);
  const std::array<std::pair<int, double>, 2> ss{{{ts.i0, 1.0 - ts.w1}, {ts.i1, ts.w1}}};
  const std::array<std::pair<int, double>, 2> st{{{tt.i0, 1.0 - tt.w1}, {tt.i1, tt.w1}}};
  const std::array<std::pair<int, double>, 2> su{{{tu.i0, 1.0 - tu.w1}, {tu.i1, tu.w1}}};
  const std::array<std::pair<int, double>, 2> sv{{{tv.i0, 1.0 - tv.w1}, {tv.i1, tv.w1}}};
  std::array<double, 3> acc{};
  for (const auto& [t, wt] : st) {
    for (const auto& [s, ws] : ss) {
      const double wcam = ws * wt;
      if (wcam == 0.0) continue;
      for (const auto& [y, wy] : sv) {
        for (const auto& [x, wx] : su) {
          const double w = wcam * wy * wx;
          if (w == 0.0) continue;
          const RgbPixel<std::int32_t> p = fetch(s, t, x, y);
          acc[0] += w * p.r;
          acc[1] += w * p.g;
          acc[2] += w * p.b;
        }
      }
    }
  }
  auto round8 = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); };
  return {round8(acc[0]), round8(acc[1]), round8(acc[2])};
}

template <typename Sampler>
RgbImage render_with(const CameraGrid& cameras, int width, int height, const CameraPose& pose,
                     const RenderOptions& options, RenderStats* stats, Sampler&& sample) {
  PlaneGeometry geometry = cameras.geometry;
  if (options.image_plane_z) geometry.image_plane_z = *options.image_plane_z;
  geometry.validate();
  pose.validate(geometry);
  RgbImage out = make_planes<std::uint8_t>(pose.width, pose.height);
  std::size_t outside = 0;
  for (int y = 0; y < pose.height; ++y) {
    for (int x = 0; x < pose.width; ++x) {
      const auto coord = ray_to_lf_coords(pixel_ray(pose, x, y), geometry, cameras, width, height);
      RgbPixel<std::uint8_t> p = options.background;
      if (coord) {
        p = sample(*coord);
      } else {
        ++outside;
      }
      out[0](y, x) = p.r;
      out[1](y, x) = p.g;
      out[2](y, x) = p.b;
    }
  }
  if (stats) stats->outside_pixels = outside;
  return out;
}

}  // namespace

CameraPose CameraPose::through_extent(const PlaneGeometry& geometry, const Eigen::Vector3d& eye, int width,
                                      int height) {
  const double depth = geometry.image_plane_z - eye.z();
  if (!(std::abs(depth) > 0.0)) throw UsageError("eye lies on the image plane");
  const ImageRect& e = geometry.image_plane_extent;
  const double half_w = 0.5 * e.width;
  const double half_h = 0.5 * e.height;
  CameraPose pose;
  pose.eye = eye;
  pose.look = Eigen::Vector3d(0.0, 0.0, depth > 0 ? 1.0 : -1.0);
  pose.up = -Eigen::Vector3d::UnitY();
  const double d = std::abs(depth);
  pose.half_fov_tan = Eigen::Vector2d(half_w / d, half_h / d);
  // Looking down -z mirrors the horizontal axis.
  const double mirror = depth > 0 ? 1.0 : -1.0;
  pose.lens_shift = Eigen::Vector2d(mirror * (e.x0 + half_w - eye.x()) / half_w, (e.y0 + half_h - eye.y()) / half_h);
  pose.width = width;
  pose.height = height;
  return pose;
}

CameraPose CameraPose::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& look, double fov_y_degrees,
                               int width, int height) {
  CameraPose pose;
  pose.eye = eye;
  pose.look = look.normalized();
  const double ty = std::tan(0.5 * fov_y_degrees * std::numbers::pi / 180.0);
  pose.half_fov_tan = Eigen::Vector2d(ty * width / std::max(1, height), ty);
  pose.width = width;
  pose.height = height;
  return pose;
}

void CameraPose::validate(const PlaneGeometry& geometry) const {
  if (width < 1 || height < 1) throw UsageError("render size must be positive");
  if (eye.z() == geometry.image_plane_z) throw UsageError("eye lies on the image plane");
  if (look.norm() == 0.0 || look.cross(up).norm() == 0.0) throw UsageError("degenerate look/up vectors");
  if (!(half_fov_tan.minCoeff() > 0.0) || !std::isfinite(half_fov_tan.maxCoeff())) {
    throw UsageError("field of view must be in (0, 180) degrees");
  }
}

Ray pixel_ray(const CameraPose& pose, int x, int y) {
  const Eigen::Vector3d forward = pose.look.normalized();
  const Eigen::Vector3d right = forward.cross(pose.up).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  const double nx = 2.0 * (x + 0.5) / pose.width - 1.0 + pose.lens_shift.x();
  const double ny = 2.0 * (y + 0.5) / pose.height - 1.0 + pose.lens_shift.y();
  return {pose.eye, forward + nx * pose.half_fov_tan.x() * right + ny * pose.half_fov_tan.y() * down};
}

std::optional<LfCoord> ray_to_lf_coords(const Ray& ray, const PlaneGeometry& geometry, const CameraGrid& cameras,
                                        int width, int height) {
  if (ray.direction.z() == 0.0) throw Error("ray is parallel to the light-slab planes");
  const double a = (geometry.camera_plane_z - ray.origin.z()) / ray.direction.z();
  const double b = (geometry.image_plane_z - ray.origin.z()) / ray.direction.z();
  const Eigen::Vector3d on_camera = ray.origin + a * ray.direction;
  const Eigen::Vector3d on_image = ray.origin + b * ray.direction;

  const auto s = axis_index(column_axis(cameras), on_camera.x());
  const auto t = axis_index(row_axis(cameras), on_camera.y());
  if (!s || !t) return std::nullopt;

  const ImageRect& e = geometry.image_plane_extent;
  const double u = (on_image.x() - e.x0) / (e.width / width) - 0.5;
  const double v = (on_image.y() - e.y0) / (e.height / height) - 0.5;
  const double eps = kSnap * std::max(width, height);
  if (u < -0.5 - eps || u > width - 0.5 + eps || v < -0.5 - eps || v > height - 0.5 + eps) return std::nullopt;
  return LfCoord{*s, *t, u, v};
}

Eigen::Vector2d camera_plane_point(const CameraGrid& cameras, double s, double t) {
  auto interp = [](const std::vector<double>& axis, double c) {
    c = std::clamp(c, 0.0, static_cast<double>(axis.size() - 1));
    const auto i = static_cast<std::size_t>(std::floor(c));
    if (i + 1 >= axis.size()) return axis.back();
    const double f = c - static_cast<double>(i);
    return f == 0.0 ? axis[i] : axis[i] + f * (axis[i + 1] - axis[i]);
  };
  return {interp(column_axis(cameras), s), interp(row_axis(cameras), t)};
}

BlockCache::BlockCache(const DecoderState& state, int stop_level) : state_(state), stop_level_(stop_level) {}

RgbPixel<std::int32_t> BlockCache::pixel(int s, int t, int x, int y) {
  const StreamLayout& layout = state_.layout();
  const int b = layout.block_size;
  const BlockIndex block{x / b, y / b};
  const std::uint64_t key = (static_cast<std::uint64_t>(t * layout.s_count + s) << 32) |
                            static_cast<std::uint32_t>(block.by * layout.blocks_x() + block.bx);
  auto it = blocks_.find(key);
  if (it == blocks_.end()) {
    ViewPlanes ycocg;
    for (int c = 0; c < kChannelCount; ++c) {
      ycocg[c] = decode_block_progressive(state_, {s, t}, block, c, stop_level_);
      ++decodes_;
    }
    ViewPlanes rgb = ycocgr_to_rgb(ycocg);
    for (auto& p : rgb) p = p.cwiseMax(0).cwiseMin(255);
    it = blocks_.emplace(key, std::move(rgb)).first;
  }
  const ViewPlanes& rgb = it->second;
  const int by = y % b;
  const int bx = x % b;
  return {rgb[0](by, bx), rgb[1](by, bx), rgb[2](by, bx)};
}

RgbPixel<std::uint8_t> sample_quadrilinear(BlockCache& cache, const CameraGrid& cameras, const LfCoord& c) {
  const StreamLayout& layout = cache.layout();
  return blend_quadrilinear(c, cameras.s_count, cameras.t_count, layout.width, layout.height,
                            [&](int s, int t, int x, int y) { return cache.pixel(s, t, x, y); });
}

RgbPixel<std::uint8_t> sample_quadrilinear(const LightFieldGrid& lf, const LfCoord& c) {
  return blend_quadrilinear(c, lf.cameras.s_count, lf.cameras.t_count, lf.width, lf.height,
                            [&](int s, int t, int x, int y) {
                              const RgbImage& img = lf.image(s, t);
                              return RgbPixel<std::int32_t>{img[0](y, x), img[1](y, x), img[2](y, x)};
                            });
}

RgbImage render_view(const DecoderState& state, const CameraGrid& cameras, const CameraPose& pose,
                     const RenderOptions& options, RenderStats* stats) {
  const StreamLayout& layout = state.layout();
  if (cameras.s_count != layout.s_count || cameras.t_count != layout.t_count) {
    throw VerificationError("camera grid does not match the stream");
  }
  if (options.stop_level < 0 || options.stop_level > layout.tree_height) {
    throw UsageError("progressive level out of range");
  }
  BlockCache cache(state, options.stop_level);
  RgbImage out = render_with(cameras, layout.width, layout.height, pose, options, stats,
                             [&](const LfCoord& c) { return sample_quadrilinear(cache, cameras, c); });
  if (stats) stats->block_decodes = cache.decodes();
  return out;
}

RgbImage render_view(const LightFieldGrid& lf, const CameraPose& pose, const RenderOptions& options) {
  return render_with(lf.cameras, lf.width, lf.height, pose, options, nullptr,
                     [&](const LfCoord& c) { return sample_quadrilinear(lf, c); });
}

}  // namespace rlfc
