#pragma once

#include <cstdint>

#include "rlfc/plane.hpp"

namespace rlfc {

/*
    Lossless YCoCg-R.

    Co = R - B
     t = B + floor(Co / 2)
    Cg = G - t
     Y = t + floor(Cg / 2)

    All halvings are arithmetic shifts, i.e. floor toward -inf, so every
    step can be undone exactly even when Co or Cg is negative.

     t = Y - floor(Cg / 2)
     G = Cg + t
     B = t - floor(Co / 2)
     R = B + Co
*/

template <typename Scalar = std::int32_t>
struct YCoCgPixel {
  Scalar y;
  Scalar co;
  Scalar cg;
  bool operator==(const YCoCgPixel&) const = default;
};

template <typename Scalar = std::int32_t>
struct RgbPixel {
  Scalar r;
  Scalar g;
  Scalar b;
  bool operator==(const RgbPixel&) const = default;
};

template <typename Scalar = std::int32_t>
constexpr YCoCgPixel<Scalar> rgb_to_ycocgr(Scalar r, Scalar g, Scalar b) {
  const Scalar co = r - b;
  const Scalar t = b + (co >> 1);
  const Scalar cg = g - t;
  const Scalar y = t + (cg >> 1);
  return {y, co, cg};
}

template <typename Scalar = std::int32_t>
constexpr RgbPixel<Scalar> ycocgr_to_rgb(const YCoCgPixel<Scalar>& p) {
  const Scalar t = p.y - (p.cg >> 1);
  const Scalar g = p.cg + t;
  const Scalar b = t - (p.co >> 1);
  const Scalar r = b + p.co;
  return {r, g, b};
}

/// Forward transform of a whole view. Input planes are R, G, B.
template <typename In>
ViewPlanes rgb_to_ycocgr(const Planes3<In>& rgb) {
  const PlaneI r = rgb[0].template cast<std::int32_t>();
  const PlaneI g = rgb[1].template cast<std::int32_t>();
  const PlaneI b = rgb[2].template cast<std::int32_t>();
  ViewPlanes out;
  out[kCo] = r - b;
  const PlaneI t = b + out[kCo].unaryExpr([](std::int32_t v) { return v >> 1; });
  out[kCg] = g - t;
  out[kY] = t + out[kCg].unaryExpr([](std::int32_t v) { return v >> 1; });
  return out;
}

/// Inverse transform of a whole view, returned as signed R, G, B planes.
/// Values stay unclamped so lossy reconstructions can be inspected.
inline ViewPlanes ycocgr_to_rgb(const ViewPlanes& ycocg) {
  const PlaneI t = ycocg[kY] - ycocg[kCg].unaryExpr([](std::int32_t v) { return v >> 1; });
  ViewPlanes out;
  out[1] = ycocg[kCg] + t;
  out[2] = t - ycocg[kCo].unaryExpr([](std::int32_t v) { return v >> 1; });
  out[0] = out[2] + ycocg[kCo];
  return out;
}

/// Inverse transform clamped to 8-bit RGB.
inline RgbImage ycocgr_to_rgb8(const ViewPlanes& ycocg) {
  const ViewPlanes rgb = ycocgr_to_rgb(ycocg);
  RgbImage out;
  for (int c = 0; c < 3; ++c) out[c] = rgb[c].cwiseMax(0).cwiseMin(255).cast<std::uint8_t>();
  return out;
}

inline RgbPixel<std::uint8_t> clamp_rgb8(const RgbPixel<std::int32_t>& p) {
  auto clamp = [](std::int32_t v) {
    return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  };
  return {clamp(p.r), clamp(p.g), clamp(p.b)};
}

// Chroma bias used when handing planes to an unsigned root codec.
inline constexpr std::int32_t kChromaBias = 256;

inline std::int32_t root_bias(int channel) { return channel == kY ? 0 : kChromaBias; }

}  // namespace rlfc
