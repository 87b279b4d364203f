#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "rlfc/colorspace.hpp"
#include "rlfc/encoder.hpp"
#include "rlfc/errors.hpp"
#include "rlfc/hierarchy.hpp"
#include "support.hpp"

using namespace rlfc;

namespace {

// Largest-remainder rounding of real weights to 256, written out with a
// sort on (remainder desc, index asc).
std::vector<int> oracle_weights(const std::vector<Eigen::Vector2d>& pos, double sigma, bool gaussian) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pos) c += p;
  c /= static_cast<double>(pos.size());
  std::vector<double> raw;
  for (const auto& p : pos) raw.push_back(gaussian ? std::exp(-(p - c).squaredNorm() / (2 * sigma * sigma)) : 1.0);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<int> w;
  std::vector<std::pair<double, int>> rem;
  int sum = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double e = 256.0 * raw[i] / total;
    w.push_back(static_cast<int>(e));
    sum += w.back();
    rem.emplace_back(-(e - w.back()), static_cast<int>(i));
  }
  std::sort(rem.begin(), rem.end());
  for (int k = 0; k < 256 - sum; ++k) ++w[rem[k].second];
  return w;
}

PlaneI random_plane(int rows, int cols, int lo, int hi) {
  PlaneI p(rows, cols);
  for (int i = 0; i < p.size(); ++i) p.data()[i] = test::uniform_int(lo, hi);
  return p;
}

EncodingParams params_with(int tp, int tb, int s) {
  EncodingParams p;
  p.pixel_threshold = tp;
  p.block_threshold = tb;
  p.quant_shift = s;
  return p;
}

}  // namespace

TEST_CASE("cluster map") {
  const ClusterMap m = cluster_level({5, 3});
  CHECK(m.parent_dims == GridDims{3, 2});
  CHECK(m.children_of(0, 0).size() == 4);
  CHECK(m.children_of(2, 0).size() == 2);
  CHECK(m.children_of(2, 1).size() == 1);
  CHECK(m.children_of(1, 1).size() == 2);
  CHECK(m.parent_of(4, 2) == GridDims{2, 1});
}

TEST_CASE("cluster weights") {
  const std::vector<Eigen::Vector2d> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  CHECK(cluster_weights(square, {}) == std::vector<int>{64, 64, 64, 64});
  const std::vector<Eigen::Vector2d> three{{0, 0}, {1, 0}, {0, 1}};
  FilterSpec uniform{FilterKind::Uniform, 179};
  CHECK(cluster_weights(three, uniform) == std::vector<int>{86, 85, 85});
  CHECK(cluster_weights(std::vector<Eigen::Vector2d>{{3, 3}}, {}) == std::vector<int>{256});

  for (int rep = 0; rep < 200; ++rep) {
    const int n = test::uniform_int(1, 4);
    std::vector<Eigen::Vector2d> pos;
    for (int i = 0; i < n; ++i) pos.emplace_back(test::uniform_int(0, 40) / 8.0, test::uniform_int(0, 40) / 8.0);
    const int sigma_q = test::uniform_int(64, 512);
    const auto w = cluster_weights(pos, {FilterKind::Gaussian, sigma_q});
    REQUIRE(std::accumulate(w.begin(), w.end(), 0) == 256);
    REQUIRE(w == oracle_weights(pos, sigma_q / 256.0, true));
  }
}

TEST_CASE("cluster filter is floor((sum w I + 128) / 256)") {
  const std::vector<int> w{90, 60, 60, 46};
  std::vector<PlaneI> planes;
  for (int i = 0; i < 4; ++i) planes.push_back(random_plane(5, 7, -300, 300));
  std::vector<const PlaneI*> ptrs;
  for (const auto& p : planes) ptrs.push_back(&p);
  const PlaneI out = filter_cluster(ptrs, w);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      long num = 128;
      for (int i = 0; i < 4; ++i) num += static_cast<long>(w[i]) * planes[i](y, x);
      REQUIRE(out(y, x) == static_cast<int>(std::floor(num / 256.0)));
    }
  }
  const PlaneI small = PlaneI::Zero(2, 2);
  std::vector<const PlaneI*> mixed{&planes[0], &small};
  CHECK_THROWS(filter_cluster(mixed, std::vector<int>{128, 128}));
}

TEST_CASE("residuals") {
  const PlaneI a = random_plane(4, 4, 0, 255);
  CHECK((compute_srv(a, a) == 0).all());
  CHECK((compute_srv((a + 5).eval(), a) == 5).all());
  CHECK_THROWS(compute_srv(a, PlaneI::Zero(4, 5)));
}

TEST_CASE("quantizer") {
  CHECK(quantize(13, 2) == 3);
  CHECK(dequantize(3, 2) == 14);
  CHECK(quantize(-13, 2) == -3);
  CHECK(dequantize(-3, 2) == -14);
  CHECK(dequantize(0, 3) == 0);
  for (int s = 0; s <= 8; ++s) {
    const int loose = (1 << s) - 1 + (s > 0 ? 1 << (s - 1) : 0);
    for (int r = -510; r <= 510; ++r) {
      const int q = quantize(r, s);
      const int err = std::abs(r - dequantize(q, s));
      REQUIRE(err <= loose);
      REQUIRE(err <= (q == 0 ? (1 << s) - 1 : (s > 0 ? 1 << (s - 1) : 0)));
      REQUIRE(quantize(-r, s) == -q);
    }
  }
}

TEST_CASE("threshold and quantize") {
  SUBCASE("zero residual is absent") {
    const auto r = threshold_and_quantize(PlaneI::Zero(8, 8), params_with(0, 0, 0));
    CHECK(r.channel.block_present_count() == 0);
    CHECK((r.reconstructed == 0).all());
  }
  SUBCASE("lossless setting keeps every nonzero block") {
    PlaneI res = PlaneI::Zero(6, 10);
    res(0, 0) = 1;
    res(5, 9) = -700;
    const auto r = threshold_and_quantize(res, params_with(0, 0, 0));
    CHECK(r.channel.quantized.rows() == 8);
    CHECK(r.channel.quantized.cols() == 12);
    CHECK(r.channel.block_present_count() == 2);
    CHECK((r.reconstructed == res).all());
  }
  SUBCASE("pixel and block thresholds") {
    PlaneI res = PlaneI::Zero(8, 8);
    res.block(0, 0, 4, 4).setConstant(3);   // below Tp = 4
    res.block(0, 4, 4, 4).setConstant(5);   // energy 80, Tb = 80 keeps it
    res.block(4, 0, 4, 4).setConstant(4);   // energy 64 < 80
    res(4, 4) = -100;                       // energy 100
    const auto r = threshold_and_quantize(res, params_with(4, 80, 2));
    CHECK(r.channel.present == std::vector<std::uint8_t>{0, 1, 0, 1});
    CHECK((r.reconstructed.block(0, 4, 4, 4) == 6).all());
    CHECK(r.reconstructed(4, 4) == -102);
    CHECK((r.reconstructed.block(0, 0, 4, 4) == 0).all());
    CHECK((r.reconstructed.block(4, 0, 4, 4) == 0).all());
  }
  SUBCASE("blocks that quantize to zero are absent") {
    PlaneI res = PlaneI::Constant(4, 4, 3);
    const auto r = threshold_and_quantize(res, params_with(0, 0, 2));
    CHECK(r.channel.block_present_count() == 0);
  }
}

TEST_CASE("closed loop on the synthetic light field") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const auto views = to_ycocg_views(lf);
  const GridDims grid{lf.s_count(), lf.t_count()};
  for (auto params : {test::lossless_params(), params_with(4, 80, 2), params_with(0, 20, 1)}) {
    const RkvTree rkv = build_rkv_tree(views, lf.cameras.positions, grid, params);
    REQUIRE(rkv.height() == params.tree_height);
    StreamLayout layout{grid.x, grid.y, lf.width, lf.height, params.tree_height, params.block_size};
    const SrvBuildResult srv = build_srv_tree(rkv, layout, params);
    const int b = params.block_size;
    // root ancestor + sum of dequantized ancestors reproduces every view.
    for (int t = 0; t < grid.y; ++t) {
      for (int s = 0; s < grid.x; ++s) {
        const AncestorChain chain = layout.ancestors({s, t});
        for (int c = 0; c < kChannelCount; ++c) {
          PlaneI acc = PlaneI::Zero(layout.padded_height(), layout.padded_width());
          acc.topLeftCorner(lf.height, lf.width) = rkv.top().node(chain.root_x, chain.root_y).channels[c];
          for (const auto& n : chain.nodes) {
            const SrvChannel& ch = srv.tree.levels[n.level].node(n.x, n.y).channels[c];
            for (int by = 0; by < layout.blocks_y(); ++by) {
              for (int bx = 0; bx < layout.blocks_x(); ++bx) {
                if (!ch.present[by * layout.blocks_x() + bx]) continue;
                acc.block(by * b, bx * b, b, b) += ch.quantized.block(by * b, bx * b, b, b)
                                                       .cast<std::int32_t>()
                                                       .unaryExpr([&](int q) { return dequantize(q, params.quant_shift); });
              }
            }
          }
          const PlaneI expect = srv.reconstructed[layout.s_count * t + s][c];
          REQUIRE((acc.topLeftCorner(lf.height, lf.width) == expect).all());
          if (params.quant_shift == 0 && params.block_threshold == 0) {
            REQUIRE((expect == views[layout.s_count * t + s][c]).all());
          }
        }
      }
    }
  }
}

TEST_CASE("constant light field has no residual blocks") {
  LightFieldGrid lf = test::synthetic_lf();
  for (auto& img : lf.images) {
    img[0].setConstant(40);
    img[1].setConstant(200);
    img[2].setConstant(90);
  }
  const auto views = to_ycocg_views(lf);
  const EncodingParams p = test::lossless_params();
  const RkvTree rkv = build_rkv_tree(views, lf.cameras.positions, {8, 8}, p);
  const SrvBuildResult srv = build_srv_tree(rkv, {8, 8, 64, 64, 3, 4}, p);
  CHECK(srv.tree.present_blocks() == 0);
}

TEST_CASE("present blocks fall as the block threshold rises") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const auto views = to_ycocg_views(lf);
  int previous = -1;
  for (int tb : {0, 50, 150}) {
    const EncodingParams p = params_with(4, tb, 2);
    const RkvTree rkv = build_rkv_tree(views, lf.cameras.positions, {8, 8}, p);
    const int n = build_srv_tree(rkv, {8, 8, 64, 64, 3, 4}, p).tree.present_blocks();
    if (previous >= 0) CHECK(n <= previous);
    previous = n;
  }
}

TEST_CASE("level-1 residuals are sparser than differences to a single key view") {
  const LightFieldGrid& lf = test::synthetic_lf();
  const auto views = to_ycocg_views(lf);
  const RkvTree rkv = build_rkv_tree(views, lf.cameras.positions, {8, 8}, EncodingParams{});
  auto small_fraction = [](const PlaneI& r) { return (r.abs() < 4).cast<double>().mean(); };
  double srv_small = 0, diff_small = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      srv_small += small_fraction(compute_srv(rkv.levels[1].node(x, y).channels[kY],
                                              rkv.levels[2].node(x / 2, y / 2).channels[kY])) / 16;
    }
  }
  const PlaneI& key = views[3 * 8 + 3][kY];
  for (int i = 0; i < 64; ++i) diff_small += small_fraction(compute_srv(views[i][kY], key)) / 64;
  CHECK(srv_small > diff_small);
}

TEST_CASE("parameter validation") {
  EncodingParams p;
  CHECK_NOTHROW(p.validate());
  p.block_size = 5;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.quant_shift = 9;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.tree_height = 0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.pixel_threshold = -1;
  CHECK_THROWS_AS(p.validate(), UsageError);
}
