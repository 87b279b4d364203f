#include <cmath>
#include <vector>

#include "doctest.h"

#include "rlfc/errors.hpp"
#include "rlfc/metrics.hpp"
#include "support.hpp"

using namespace rlfc;

TEST_CASE("psnr of known errors") {
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(1.0) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(psnr_from_mse(255.0 * 255.0) == doctest::Approx(0.0));
  PlaneI a = PlaneI::Zero(2, 2), b = PlaneI::Zero(2, 2);
  b(0, 0) = 2;  // mse = 1
  CHECK(psnr_channel(a, b) == doctest::Approx(psnr_from_mse(1.0)));
  CHECK_THROWS(psnr_channel(a, PlaneI::Zero(3, 2)));
}

TEST_CASE("weighted combination and averaging") {
  CHECK(combine_ycocg(40, 32, 24) == doctest::Approx(37.0));
  const std::vector<double> mixed{30.0, kInfinitePsnr};
  CHECK(average_psnr(mixed) == doctest::Approx((30.0 + kPsnrCap) / 2));
  const std::vector<double> all_inf{kInfinitePsnr, kInfinitePsnr};
  CHECK(std::isinf(average_psnr(all_inf)));
}

TEST_CASE("light field quality") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const QualityReport same = psnr_ycocg(lf, lf);
  CHECK(std::isinf(same.psnr_ycocg));
  CHECK(same.mse_y == 0.0);

  LightFieldGrid noisy = lf;
  noisy.images[0][1](0, 0) ^= 1;  // flips the green LSB of a single pixel
  const QualityReport q = psnr_ycocg(lf, noisy);
  // Co = R - B is untouched, so only Y and Cg see the error.
  CHECK(std::isinf(q.psnr_co));
  CHECK(std::isfinite(q.psnr_cg));
  CHECK(q.psnr_cg > 90.0);
  CHECK(q.mse_cg > 0.0);

  LightFieldGrid other = synthesize_lightfield({4, 8, 64, 64, 7});
  CHECK_THROWS_AS(psnr_ycocg(lf, other), VerificationError);
}

TEST_CASE("bits per pixel") {
  CHECK(bpp(64 * 64 * 64, 8, 8, 64, 64) == doctest::Approx(8.0));
  CHECK(bpp(3, 1, 1, 2, 2) == doctest::Approx(6.0));
}

TEST_CASE("csv row and json report") {
  QualityReport r;
  r.bpp = 0.5;
  r.psnr_y = 40;
  r.psnr_co = 41;
  r.psnr_cg = kInfinitePsnr;
  r.psnr_ycocg = 42;
  CHECK(std::string(kSweepCsvHeader) == "param_value,bpp,psnr_y,psnr_co,psnr_cg,psnr_ycocg");
  CHECK(sweep_csv_row("80", r) == "80,0.500000,40.0000,41.0000,inf,42.0000");
  const std::string j = r.to_json();
  CHECK(j.find("\"psnr_cg\": \"inf\"") != std::string::npos);
  CHECK(j.find("\"bpp\": 0.5") != std::string::npos);
}
