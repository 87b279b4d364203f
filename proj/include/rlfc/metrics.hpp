#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "rlfc/lightfield.hpp"
#include "rlfc/plane.hpp"

namespace rlfc {

/// PSNR of an exact reconstruction.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// Finite entries are averaged with infinite ones capped at this value.
inline constexpr double kPsnrCap = 99.0;

struct QualityReport {
  double psnr_y = 0.0;
  double psnr_co = 0.0;
  double psnr_cg = 0.0;
  double psnr_ycocg = 0.0;
  double mse_y = 0.0;
  double mse_co = 0.0;
  double mse_cg = 0.0;
  double bpp = 0.0;

  std::string to_json() const;
};

inline double psnr_from_mse(double mse) {
  return mse == 0.0 ? kInfinitePsnr : 10.0 * std::log10(255.0 * 255.0 / mse);
}

template <typename A, typename B>
double mse(const Eigen::ArrayBase<A>& ref, const Eigen::ArrayBase<B>& test) {
  const auto diff = ref.template cast<double>() - test.template cast<double>();
  return diff.square().mean();
}

/// 10 log10(255^2 / MSE); +inf for identical planes.
template <typename A, typename B>
double psnr_channel(const Eigen::ArrayBase<A>& ref, const Eigen::ArrayBase<B>& test) {
  if (ref.rows() != test.rows() || ref.cols() != test.cols()) throw std::invalid_argument("psnr_channel: size mismatch");
  return psnr_from_mse(mse(ref, test));
}

/// 6:1:1 weighting of the Y, Co and Cg PSNRs.
inline double combine_ycocg(double y, double co, double cg) { return (6.0 * y + co + cg) / 8.0; }

/// Mean of per-image PSNRs. All-infinite stays infinite; otherwise infinite
/// entries count as kPsnrCap.
double average_psnr(std::span<const double> per_image);

/// Channel PSNRs in YCoCg-R space, averaged over the views of the grid.
QualityReport psnr_ycocg(const LightFieldGrid& ref, const LightFieldGrid& test);

/// 8 * bytes / (S * T * W * H).
double bpp(std::size_t stream_bytes, int s_count, int t_count, int width, int height);

inline constexpr const char* kSweepCsvHeader = "param_value,bpp,psnr_y,psnr_co,psnr_cg,psnr_ycocg";

std::string sweep_csv_row(const std::string& param_value, const QualityReport& report);

}  // namespace rlfc
