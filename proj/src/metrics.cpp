#include "rlfc/metrics.hpp"

#include <cstdio>
#include <numeric>
#include <vector>

#include "json.hpp"

#include "rlfc/colorspace.hpp"
#include "rlfc/errors.hpp"

namespace rlfc {
namespace {

nlohmann::json psnr_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

std::string psnr_text(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double average_psnr(std::span<const double> per_image) {
  if (per_image.empty()) return kInfinitePsnr;
  bool all_inf = true;
  double sum = 0.0;
  for (double v : per_image) {
    all_inf = all_inf && std::isinf(v);
    sum += std::isinf(v) ? kPsnrCap : v;
  }
  return all_inf ? kInfinitePsnr : sum / static_cast<double>(per_image.size());
}

QualityReport psnr_ycocg(const LightFieldGrid& ref, const LightFieldGrid& test) {
  if (ref.width != test.width || ref.height != test.height || ref.s_count() != test.s_count() ||
      ref.t_count() != test.t_count() || ref.images.size() != test.images.size()) {
    throw VerificationError("light fields differ in grid or image dimensions");
  }
  std::array<std::vector<double>, kChannelCount> psnr;
  std::array<double, kChannelCount> mse_sum{};
  for (std::size_t i = 0; i < ref.images.size(); ++i) {
    const ViewPlanes a = rgb_to_ycocgr(ref.images[i]);
    const ViewPlanes b = rgb_to_ycocgr(test.images[i]);
    for (int c = 0; c < kChannelCount; ++c) {
      const double m = mse(a[c], b[c]);
      mse_sum[c] += m;
      psnr[c].push_back(psnr_from_mse(m));
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, ref.images.size()));
  QualityReport r;
  r.psnr_y = average_psnr(psnr[kY]);
  r.psnr_co = average_psnr(psnr[kCo]);
  r.psnr_cg = average_psnr(psnr[kCg]);
  r.psnr_ycocg = combine_ycocg(r.psnr_y, r.psnr_co, r.psnr_cg);
  r.mse_y = mse_sum[kY] / n;
  r.mse_co = mse_sum[kCo] / n;
  r.mse_cg = mse_sum[kCg] / n;
  return r;
}

double bpp(std::size_t stream_bytes, int s_count, int t_count, int width, int height) {
  const double pixels = static_cast<double>(s_count) * t_count * width * height;
  return 8.0 * static_cast<double>(stream_bytes) / pixels;
}

std::string QualityReport::to_json() const {
  nlohmann::json j = {{"psnr_y", psnr_json(psnr_y)},   {"psnr_co", psnr_json(psnr_co)},
                      {"psnr_cg", psnr_json(psnr_cg)}, {"psnr_ycocg", psnr_json(psnr_ycocg)},
                      {"mse_y", mse_y},                {"mse_co", mse_co},
                      {"mse_cg", mse_cg},              {"bpp", bpp}};
  return j.dump(2);
}

std::string sweep_csv_row(const std::string& param_value, const QualityReport& report) {
  char bpp_buf[32];
  std::snprintf(bpp_buf, sizeof(bpp_buf), "%.6f", report.bpp);
  return param_value + "," + bpp_buf + "," + psnr_text(report.psnr_y) + "," + psnr_text(report.psnr_co) + "," +
         psnr_text(report.psnr_cg) + "," + psnr_text(report.psnr_ycocg);
}

}  // namespace rlfc
