#include "rlfc/lightfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "rlfc/errors.hpp"
#include "rlfc/image_io.hpp"

namespace rlfc {
namespace {

std::string cell_name(int s, int t) { return "(" + std::to_string(s) + "," + std::to_string(t) + ")"; }

// Portable [0, 1) doubles from a fixed engine; the standard distributions are
// implementation defined and would make synthetic data toolchain dependent.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct Wave {
  double fx, fy, phase, amplitude;
};

struct Scene {
  double background_z = 5.0;
  double occluder_z = 3.0;
  Eigen::Vector2d occluder_center;
  double occluder_radius = 2.2;
  std::array<double, 3> background_base{};
  std::array<std::array<Wave, 3>, 3> background_waves{};
  double checker_cell = 3.0;
  double checker_amplitude = 24.0;
  std::array<double, 3> occluder_base{};
  double stripe_angle = 0.0;
  double stripe_frequency = 0.25;
  double stripe_amplitude = 40.0;
};

Scene make_scene(const SyntheticSpec& spec, const Eigen::Vector2d& grid_center) {
  SceneRng rng(spec.seed);
  Scene scene;
  for (int c = 0; c < 3; ++c) {
    scene.background_base[c] = rng.uniform(80.0, 170.0);
    for (auto& w : scene.background_waves[c]) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double freq = rng.uniform(0.05, 0.25);
      w = {freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, 2.0 * std::numbers::pi),
           rng.uniform(8.0, 22.0)};
    }
    scene.occluder_base[c] = rng.uniform(40.0, 215.0);
  }
  scene.occluder_center = grid_center + Eigen::Vector2d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  scene.stripe_angle = rng.uniform(0.0, std::numbers::pi);
  return scene;
}

double smooth_checker(double x, double y, double cell) {
  // Product of two smoothed square waves in [-1, 1].
  auto square = [cell](double v) {
    const double s = std::sin(std::numbers::pi * v / cell);
    return std::tanh(4.0 * s);
  };
  return square(x) * square(y);
}

std::array<double, 3> shade_ray(const Scene& scene, const Eigen::Vector2d& from, const Eigen::Vector2d& through,
                                double through_z) {
  const Eigen::Vector2d on_occluder = from + (through - from) * (scene.occluder_z / through_z);
  std::array<double, 3> rgb{};
  if ((on_occluder - scene.occluder_center).norm() < scene.occluder_radius) {
    const double u = on_occluder.x() * std::cos(scene.stripe_angle) + on_occluder.y() * std::sin(scene.stripe_angle);
    const double stripe = std::sin(2.0 * std::numbers::pi * scene.stripe_frequency * u);
    for (int c = 0; c < 3; ++c) rgb[c] = scene.occluder_base[c] + scene.stripe_amplitude * stripe * (c == 1 ? -0.5 : 1.0);
    return rgb;
  }
  const Eigen::Vector2d p = from + (through - from) * (scene.background_z / through_z);
  const double checker = smooth_checker(p.x(), p.y(), scene.checker_cell);
  for (int c = 0; c < 3; ++c) {
    double v = scene.background_base[c] + scene.checker_amplitude * checker;
    for (const auto& w : scene.background_waves[c]) {
      v += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * p.x() + w.fy * p.y()) + w.phase);
    }
    rgb[c] = v;
  }
  return rgb;
}

PlaneGeometry geometry_from_json(const nlohmann::json& j) {
  PlaneGeometry g;
  g.camera_plane_z = j.at("camera_plane_z").get<double>();
  g.image_plane_z = j.at("image_plane_z").get<double>();
  const auto& e = j.at("image_plane_extent");
  g.image_plane_extent = {e.at("x0").get<double>(), e.at("y0").get<double>(), e.at("width").get<double>(),
                          e.at("height").get<double>()};
  return g;
}

nlohmann::json geometry_to_json(const PlaneGeometry& g) {
  return {{"camera_plane_z", g.camera_plane_z},
          {"image_plane_z", g.image_plane_z},
          {"image_plane_extent",
           {{"x0", g.image_plane_extent.x0},
            {"y0", g.image_plane_extent.y0},
            {"width", g.image_plane_extent.width},
            {"height", g.image_plane_extent.height}}}};
}

}  // namespace

void PlaneGeometry::validate() const {
  if (camera_plane_z == image_plane_z) throw FormatError("camera plane and image plane coincide");
  if (!(image_plane_extent.width > 0.0) || !(image_plane_extent.height > 0.0)) {
    throw FormatError("image plane extent must have positive size");
  }
}

PlaneGeometry PlaneGeometry::centered(const std::vector<Eigen::Vector2d>& positions, int width, int height) {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  if (!positions.empty()) {
    Eigen::Vector2d lo = positions.front(), hi = positions.front();
    for (const auto& p : positions) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    center = 0.5 * (lo + hi);
  }
  constexpr double kPitch = 0.25;
  PlaneGeometry g;
  g.camera_plane_z = 0.0;
  g.image_plane_z = 4.0;
  g.image_plane_extent = {center.x() - 0.5 * kPitch * width, center.y() - 0.5 * kPitch * height, kPitch * width,
                          kPitch * height};
  return g;
}

const Eigen::Vector2d& CameraGrid::position(int s, int t) const {
  if (s < 0 || t < 0 || s >= s_count || t >= t_count) {
    throw std::out_of_range("camera index " + cell_name(s, t) + " outside " + std::to_string(s_count) + "x" +
                            std::to_string(t_count) + " grid");
  }
  return positions[index(s, t)];
}

double CameraGrid::column_x(int s) const {
  double sum = 0.0;
  for (int t = 0; t < t_count; ++t) sum += positions[index(s, t)].x();
  return sum / t_count;
}

double CameraGrid::row_y(int t) const {
  double sum = 0.0;
  for (int s = 0; s < s_count; ++s) sum += positions[index(s, t)].y();
  return sum / s_count;
}

void CameraGrid::validate() const {
  if (s_count < 1 || t_count < 1) throw FormatError("camera grid must be at least 1x1");
  if (static_cast<int>(positions.size()) != count()) throw FormatError("camera position count does not match grid");
  for (int t = 0; t < t_count; ++t) {
    for (int s = 0; s < s_count; ++s) {
      if (s + 1 < s_count && !(positions[index(s + 1, t)].x() > positions[index(s, t)].x())) {
        throw FormatError("camera positions not increasing in x at " + cell_name(s + 1, t));
      }
      if (t + 1 < t_count && !(positions[index(s, t + 1)].y() > positions[index(s, t)].y())) {
        throw FormatError("camera positions not increasing in y at " + cell_name(s, t + 1));
      }
    }
  }
  geometry.validate();
}

CameraGrid CameraGrid::uniform(int s_count, int t_count, int width, int height) {
  CameraGrid g;
  g.s_count = s_count;
  g.t_count = t_count;
  g.positions.reserve(static_cast<std::size_t>(std::max(0, s_count * t_count)));
  for (int t = 0; t < t_count; ++t) {
    for (int s = 0; s < s_count; ++s) g.positions.emplace_back(s, t);
  }
  g.geometry = PlaneGeometry::centered(g.positions, width, height);
  return g;
}

void LightFieldGrid::validate() const {
  cameras.validate();
  if (width < 1 || height < 1) throw FormatError("image dimensions must be positive");
  if (static_cast<int>(images.size()) != cameras.count()) throw FormatError("image count does not match grid");
  for (int t = 0; t < t_count(); ++t) {
    for (int s = 0; s < s_count(); ++s) {
      for (const auto& p : image(s, t)) {
        if (p.cols() != width || p.rows() != height) throw FormatError("resolution mismatch at " + cell_name(s, t));
      }
    }
  }
}

bool LightFieldGrid::same_pixels(const LightFieldGrid& other) const {
  if (width != other.width || height != other.height || s_count() != other.s_count() ||
      t_count() != other.t_count()) {
    return false;
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      if ((images[i][c] != other.images[i][c]).any()) return false;
    }
  }
  return true;
}

const Eigen::Vector2d& camera_position(const LightFieldGrid& grid, int s, int t) {
  return grid.cameras.position(s, t);
}

LightFieldGrid synthesize_lightfield(const SyntheticSpec& spec) {
  if (spec.s_count < 1 || spec.t_count < 1) throw UsageError("synthetic grid must be at least 1x1");
  if (spec.width < 1 || spec.height < 1) throw UsageError("synthetic image size must be positive");

  LightFieldGrid lf;
  lf.cameras = CameraGrid::uniform(spec.s_count, spec.t_count, spec.width, spec.height);
  lf.width = spec.width;
  lf.height = spec.height;

  const PlaneGeometry& g = lf.cameras.geometry;
  const Eigen::Vector2d grid_center(0.5 * (spec.s_count - 1), 0.5 * (spec.t_count - 1));
  const Scene scene = make_scene(spec, grid_center);
  const double pitch_x = g.image_plane_extent.width / spec.width;
  const double pitch_y = g.image_plane_extent.height / spec.height;
  const double depth = g.image_plane_z - g.camera_plane_z;
  constexpr int kSuper = 3;

  lf.images.reserve(static_cast<std::size_t>(lf.cameras.count()));
  for (int t = 0; t < spec.t_count; ++t) {
    for (int s = 0; s < spec.s_count; ++s) {
      const Eigen::Vector2d eye = lf.cameras.position(s, t);
      RgbImage img = make_planes<std::uint8_t>(spec.width, spec.height);
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          std::array<double, 3> acc{};
          for (int sy = 0; sy < kSuper; ++sy) {
            for (int sx = 0; sx < kSuper; ++sx) {
              const Eigen::Vector2d q(g.image_plane_extent.x0 + (x + (sx + 0.5) / kSuper) * pitch_x,
                                      g.image_plane_extent.y0 + (y + (sy + 0.5) / kSuper) * pitch_y);
              const auto rgb = shade_ray(scene, eye, q, depth);
              for (int c = 0; c < 3; ++c) acc[c] += rgb[c];
            }
          }
          for (int c = 0; c < 3; ++c) {
            const double v = std::floor(acc[c] / (kSuper * kSuper) + 0.5);
            img[c](y, x) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
          }
        }
      }
      lf.images.push_back(std::move(img));
    }
  }
  return lf;
}

LightFieldGrid load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }

  LightFieldGrid lf;
  try {
    const int s_count = doc.at("grid").at("s").get<int>();
    const int t_count = doc.at("grid").at("t").get<int>();
    if (s_count < 1 || t_count < 1) throw FormatError("manifest grid must be at least 1x1");
    if (doc.contains("bit_depth") && doc["bit_depth"].get<int>() != 8) {
      throw FormatError("only 8-bit manifests are supported");
    }
    lf.cameras.s_count = s_count;
    lf.cameras.t_count = t_count;

    const std::size_t cells = static_cast<std::size_t>(s_count) * t_count;
    std::vector<std::filesystem::path> paths(cells);
    std::vector<std::optional<Eigen::Vector2d>> positions(cells);
    const auto base = path.parent_path();
    for (const auto& entry : doc.at("images")) {
      const int s = entry.at("s").get<int>();
      const int t = entry.at("t").get<int>();
      if (s < 0 || t < 0 || s >= s_count || t >= t_count) {
        throw FormatError("manifest entry " + cell_name(s, t) + " lies outside the grid");
      }
      const std::size_t idx = static_cast<std::size_t>(lf.cameras.index(s, t));
      if (!paths[idx].empty()) throw FormatError("manifest lists grid cell " + cell_name(s, t) + " twice");
      std::filesystem::path p = entry.at("path").get<std::string>();
      paths[idx] = p.is_absolute() ? p : base / p;
      if (entry.contains("position")) {
        const auto& pos = entry["position"];
        positions[idx] = Eigen::Vector2d(pos.at(0).get<double>(), pos.at(1).get<double>());
      }
    }
    for (int t = 0; t < t_count; ++t) {
      for (int s = 0; s < s_count; ++s) {
        if (paths[lf.cameras.index(s, t)].empty()) {
          throw FormatError("grid-cell gap: no image for " + cell_name(s, t));
        }
      }
    }

    lf.images.resize(cells);
    lf.cameras.positions.resize(cells);
    for (int t = 0; t < t_count; ++t) {
      for (int s = 0; s < s_count; ++s) {
        const std::size_t idx = static_cast<std::size_t>(lf.cameras.index(s, t));
        if (!std::filesystem::exists(paths[idx])) {
          throw IoError("missing image for " + cell_name(s, t) + ": " + paths[idx].string());
        }
        lf.images[idx] = read_png_rgb(paths[idx]);
        const int w = static_cast<int>(lf.images[idx][0].cols());
        const int h = static_cast<int>(lf.images[idx][0].rows());
        if (idx == 0) {
          lf.width = w;
          lf.height = h;
        } else if (w != lf.width || h != lf.height) {
          throw FormatError("resolution mismatch at " + cell_name(s, t) + ": " + std::to_string(w) + "x" +
                            std::to_string(h) + " vs " + std::to_string(lf.width) + "x" + std::to_string(lf.height));
        }
        lf.cameras.positions[idx] = positions[idx].value_or(Eigen::Vector2d(s, t));
      }
    }
    lf.cameras.geometry = doc.contains("geometry")
                              ? geometry_from_json(doc["geometry"])
                              : PlaneGeometry::centered(lf.cameras.positions, lf.width, lf.height);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  lf.validate();
  return lf;
}

void save_manifest(const LightFieldGrid& grid, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  nlohmann::json images = nlohmann::json::array();
  for (int t = 0; t < grid.t_count(); ++t) {
    for (int s = 0; s < grid.s_count(); ++s) {
      char name[64];
      std::snprintf(name, sizeof(name), "view_%03d_%03d.png", s, t);
      write_png_rgb(dir / name, grid.image(s, t));
      const auto& p = grid.cameras.position(s, t);
      images.push_back({{"s", s}, {"t", t}, {"path", name}, {"position", {p.x(), p.y()}}});
    }
  }
  nlohmann::json doc = {{"grid", {{"s", grid.s_count()}, {"t", grid.t_count()}}},
                        {"bit_depth", 8},
                        {"geometry", geometry_to_json(grid.cameras.geometry)},
                        {"images", std::move(images)}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << doc.dump(2) << '\n';
}

}  // namespace rlfc
