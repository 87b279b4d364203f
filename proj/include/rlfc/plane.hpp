#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace rlfc {

/// A single image channel, row-major, indexed (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneI = Plane<std::int32_t>;
using Plane8 = Plane<std::uint8_t>;
using Plane16 = Plane<std::uint16_t>;

/// Three planes of one view; RGB or Y/Co/Cg depending on context.
template <typename Scalar>
using Planes3 = std::array<Plane<Scalar>, 3>;

using RgbImage = Planes3<std::uint8_t>;
using ViewPlanes = Planes3<std::int32_t>;

enum Channel : int { kY = 0, kCo = 1, kCg = 2 };
inline constexpr int kChannelCount = 3;

struct GridDims {
  int x = 0;
  int y = 0;

  int count() const { return x * y; }
  bool operator==(const GridDims&) const = default;
};

struct ImageIndex {
  int s = 0;
  int t = 0;
  bool operator==(const ImageIndex&) const = default;
};

struct BlockIndex {
  int bx = 0;
  int by = 0;
  bool operator==(const BlockIndex&) const = default;
};

template <typename Scalar>
Planes3<Scalar> make_planes(int width, int height, Scalar fill = Scalar(0)) {
  Planes3<Scalar> out;
  for (auto& p : out) p = Plane<Scalar>::Constant(height, width, fill);
  return out;
}

inline constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// Floor division for a power-of-two divisor (toward negative infinity).
inline constexpr std::int32_t floor_shift(std::int32_t v, int bits) { return v >> bits; }

}  // namespace rlfc
