/* Copyright 2026 The CKS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <gtest/gtest.h>

#include <random>

#include "cks/gemm.hpp"
#include "cks/ops.hpp"
#include "cks/reference.hpp"
#include "cks/verify.hpp"

namespace cks {
namespace {

// One row of four inputs, a 1x2 filter, stride 2 along the width.
ConvGeometry hand_geometry() { return infer({.iw = 4, .fw = 2, .sw = 2}); }

Tensor4<double> hand_x() { return Tensor4<double>({1, 1, 4, 1}, {1, 2, 3, 4}); }
Tensor4<double> hand_w() { return Tensor4<double>({1, 1, 2, 1}, {2, 3}); }
Tensor4<double> hand_dy() { return Tensor4<double>({1, 1, 2, 1}, {1, 10}); }

TEST(HandCase, Forward) {
  const auto y = reference::naive_conv2d(hand_x(), hand_w(), hand_geometry()).value;
  EXPECT_EQ(y.values(), (std::vector<double>{8, 18}));
  EXPECT_EQ(conv_v2(hand_x(), hand_w(), hand_geometry()).value, y);
  EXPECT_EQ(gemm_conv2d(hand_x(), hand_w(), hand_geometry()).value, y);
}

TEST(HandCase, InputGradient) {
  const auto g = hand_geometry();
  const std::vector<double> expected{2, 3, 20, 30};
  EXPECT_EQ(reference::naive_deconv2d(hand_dy(), hand_w(), g).value.values(), expected);
  EXPECT_EQ(reference::scatter_deconv2d(hand_dy(), hand_w(), g).values(), expected);
  EXPECT_EQ(ks_deconv(hand_dy(), ks_split(hand_w(), g), g).value.values(), expected);
  EXPECT_EQ(ks_deconv_v2(hand_dy(), ks_split(hand_w(), g), g).value.values(), expected);
}

TEST(HandCase, WeightGradient) {
  const auto g = hand_geometry();
  const std::vector<double> expected{31, 42};
  EXPECT_EQ(reference::naive_dilated_conv2d(hand_x(), hand_dy(), g).value.values(), expected);
  EXPECT_EQ(sk_dilated(hand_x(), hand_dy(), g).value.values(), expected);
  EXPECT_EQ(sk_dilated_v2(hand_x(), hand_dy(), g).value.values(), expected);
  EXPECT_EQ(partitioned_dilated(hand_x(), hand_dy(), g, 2).value.values(), expected);
}

TEST(HandCase, InnerProductsAgree) {
  const auto g = hand_geometry();
  const auto y = reference::naive_conv2d(hand_x(), hand_w(), g).value;
  const auto dx = reference::naive_deconv2d(hand_dy(), hand_w(), g).value;
  const auto dw = reference::naive_dilated_conv2d(hand_x(), hand_dy(), g).value;
  EXPECT_EQ(inner_product(y, hand_dy()), 188.0);
  EXPECT_EQ(inner_product(hand_x(), dx), 188.0);
  EXPECT_EQ(inner_product(hand_w(), dw), 188.0);
}

TEST(Golden, TrimmedConvolutionFlops) {
  const auto g = infer({.ih = 5, .iw = 5, .fh = 3, .fw = 3, .sh = 3, .sw = 3, .ph = 1, .pw = 1});
  std::mt19937_64 rng(3);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto w = random_tensor<double>(g.filter_dims(), rng);
  EXPECT_EQ(2 * reference::naive_conv2d(x, w, g).stats.macs, 72u);
  EXPECT_EQ(flops(g, OpKind::conv), 72u);
  const auto trimmed = conv_v2(x, w, g);
  EXPECT_EQ(2 * trimmed.stats.macs, 50u);
  EXPECT_EQ(trimmed.stats.zeros_skipped, 11u);
  EXPECT_EQ(2 * conv_direct(x, w, g).stats.macs, 72u);
}

// 4x4 input, 2x2 output gradient, 3x3 filters, stride 2, padding 1.
ConvGeometry small_strided() {
  return infer({.ih = 4, .iw = 4, .fh = 3, .fw = 3, .sh = 2, .sw = 2, .ph = 1, .pw = 1});
}

TEST(Golden, SplitDeconvolutionFlops) {
  const auto g = small_strided();
  std::mt19937_64 rng(5);
  const auto dy = random_tensor<double>(g.output_dims(), rng);
  const auto w = random_tensor<double>(g.filter_dims(), rng);
  const auto naive = reference::naive_deconv2d(dy, w, g);
  const auto split = ks_deconv(dy, ks_split(w, g), g);
  const auto trimmed = ks_deconv_v2(dy, ks_split(w, g), g);
  EXPECT_EQ(2 * naive.stats.macs, flops(g, OpKind::deconv));
  EXPECT_EQ(split.stats.macs * 4, naive.stats.macs);
  EXPECT_EQ(2 * trimmed.stats.macs, 50u);
  EXPECT_EQ(trimmed.value, naive.value);
}

TEST(Golden, StridedWeightGradientFlops) {
  const auto g = small_strided();
  std::mt19937_64 rng(6);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto dy = random_tensor<double>(g.output_dims(), rng);
  // The oracle runs over the 3x3 zero-inserted gradient.
  EXPECT_EQ(flops(g, OpKind::dilated), 162u);
  EXPECT_EQ(2 * sk_dilated(x, dy, g).stats.macs, 72u);
  EXPECT_EQ(2 * sk_dilated_v2(x, dy, g).stats.macs, 50u);
}

TEST(KernelSplit, ThreeByThreeStrideTwoExtents) {
  const auto g = small_strided();
  const auto ks = ks_split(Tensor4<double>(g.filter_dims()), g);
  EXPECT_EQ(ks.extent_h(0) * ks.extent_w(0), 4);
  EXPECT_EQ(ks.extent_h(0) * ks.extent_w(1), 2);
  EXPECT_EQ(ks.extent_h(1) * ks.extent_w(0), 2);
  EXPECT_EQ(ks.extent_h(1) * ks.extent_w(1), 1);
}

TEST(KernelSplit, ExtentsPartitionTheFilter) {
  for (std::int64_t f = 1; f <= 7; ++f) {
    for (std::int64_t s = 1; s <= 4; ++s) {
      const auto g = infer({.ih = 16, .iw = 16, .fh = f, .fw = f, .sh = s, .sw = s});
      const auto ks = ks_split(Tensor4<double>(g.filter_dims()), g);
      std::int64_t taps = 0;
      for (std::int64_t y = 0; y < s; ++y)
        for (std::int64_t x = 0; x < s; ++x) taps += ks.extent_h(y) * ks.extent_w(x);
      EXPECT_EQ(taps, f * f) << "F=" << f << " s=" << s;
    }
  }
}

TEST(KernelSplit, EntriesAreRotatedFilterTaps) {
  const auto g = infer({.ih = 9, .iw = 9, .ic = 2, .oc = 3, .fh = 5, .fw = 4, .sh = 2, .sw = 3, .ph = 1, .pw = 2});
  std::mt19937_64 rng(8);
  const auto w = random_tensor<double>(g.filter_dims(), rng);
  const auto ks = ks_split(w, g);
  std::vector<int> seen(w.size(), 0);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t oc = 0; oc < 3; ++oc)
        for (std::int64_t ch = 0; ch < ks.extent_h(y); ++ch)
          for (std::int64_t cw = 0; cw < ks.extent_w(x); ++cw)
            for (std::size_t ic = 0; ic < 2; ++ic) {
              const std::size_t fh = y + (ks.extent_h(y) - 1 - ch) * 2;
              const std::size_t fw = x + (ks.extent_w(x) - 1 - cw) * 3;
              EXPECT_EQ(ks.c.at(y, x, oc, ch, cw, ic), w.at(oc, fh, fw, ic));
              ++seen[w.offset({oc, fh, fw, ic})];
            }
  for (int count : seen) EXPECT_EQ(count, 1);
}

TEST(KernelSplit, RejectsMismatchedFilters) {
  const auto g = small_strided();
  EXPECT_THROW(ks_split(Tensor4<double>({1, 2, 3, 1}), g), ShapeError);
}

TEST(Ops, ShapeMismatchThrows) {
  const auto g = small_strided();
  const Tensor4<double> bad({1, 3, 3, 1});
  const Tensor4<double> w(g.filter_dims());
  EXPECT_THROW(conv_v2(bad, w, g), ShapeError);
  EXPECT_THROW(reference::naive_conv2d(bad, w, g), ShapeError);
  EXPECT_THROW(sk_dilated(bad, Tensor4<double>(g.output_dims()), g), ShapeError);
}

TEST(Ops, UnitStrideDeconvolutionRejectsStrides) {
  const auto g = small_strided();
  EXPECT_THROW(deconv_unit_stride(Tensor4<double>(g.output_dims()), Tensor4<double>(g.filter_dims()), g),
               ParameterError);
}

TEST(Partitioned, SegmentBounds) {
  const auto g = small_strided();
  const Tensor4<double> x(g.input_dims());
  const Tensor4<double> dy(g.output_dims());
  EXPECT_THROW(partitioned_dilated(x, dy, g, 0), ParameterError);
  EXPECT_THROW(partitioned_dilated(x, dy, g, g.n * g.oh * g.ow + 1), ParameterError);
  EXPECT_NO_THROW(partitioned_dilated(x, dy, g, g.n * g.oh * g.ow));
}

TEST(Gemm, BlockSizeDoesNotChangeResult) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1, 1);
  Matrix<double> a(37, 53), b(53, 29);
  for (auto& v : a.data) v = dist(rng);
  for (auto& v : b.data) v = dist(rng);
  Matrix<double> c1(37, 29), c2(37, 29);
  gemm(a, b, c1, 64);
  gemm(a, b, c2, 5);
  EXPECT_EQ(c1.data, c2.data);
  double expect = 0;
  for (std::size_t k = 0; k < 53; ++k) expect += a(3, k) * b(k, 7);
  EXPECT_EQ(c1(3, 7), expect);
}

TEST(Gemm, Im2colPadsWithZeros) {
  const auto g = infer({.ih = 2, .iw = 2, .fh = 3, .fw = 3, .ph = 1, .pw = 1});
  const Tensor4<double> x({1, 2, 2, 1}, {1, 2, 3, 4});
  const auto m = im2col(x, g);
  ASSERT_EQ(m.rows, 4u);
  ASSERT_EQ(m.cols, 9u);
  EXPECT_EQ((std::vector<double>(m.data.begin(), m.data.begin() + 9)),
            (std::vector<double>{0, 0, 0, 0, 1, 2, 0, 3, 4}));
}

// Property sweep over the randomized grid: every trimming kernel matches
// its oracle exactly and never executes more MACs than it.
TEST(Properties, KernelsMatchOraclesOnRandomGrid) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = random_geometry(rng);
    const auto x = random_tensor<double>(g.input_dims(), rng);
    const auto w = random_tensor<double>(g.filter_dims(), rng);
    const auto dy = random_tensor<double>(g.output_dims(), rng);
    SCOPED_TRACE(g.to_string());

    const auto y = reference::naive_conv2d(x, w, g);
    const auto dx = reference::naive_deconv2d(dy, w, g);
    const auto dw = reference::naive_dilated_conv2d(x, dy, g);
    const auto split = ks_split(w, g);

    for (const auto& r : {conv_v2(x, w, g), conv_v2(x, w, g, FilterLayout::fh_fw_ic_oc), conv_direct(x, w, g),
                          gemm_conv2d(x, w, g)}) {
      EXPECT_EQ(r.value, y.value) << r.algorithm;
      EXPECT_EQ(r.stats.macs + r.stats.zeros_skipped, y.stats.macs) << r.algorithm;
    }
    for (const auto& r : {ks_deconv(dy, split, g), ks_deconv_v2(dy, split, g), dispatch_deconv(dy, w, g)}) {
      EXPECT_EQ(r.value, dx.value) << r.algorithm;
      EXPECT_EQ(r.stats.macs + r.stats.zeros_skipped, dx.stats.macs) << r.algorithm;
      EXPECT_LE(r.stats.macs, dx.stats.macs) << r.algorithm;
    }
    for (const auto& r : {sk_dilated(x, dy, g), sk_dilated_v2(x, dy, g), partitioned_dilated(x, dy, g, 1)}) {
      EXPECT_EQ(r.value, dw.value) << r.algorithm;
      EXPECT_EQ(r.stats.macs + r.stats.zeros_skipped, dw.stats.macs) << r.algorithm;
    }
    const auto v2 = sk_dilated_v2(x, dy, g);
    EXPECT_EQ(partitioned_dilated(x, dy, g, g.n * g.oh * g.ow).stats.macs, v2.stats.macs);
    EXPECT_LT(max_rel_error(partitioned_dilated(x, dy, g, 3 < g.n * g.oh * g.ow ? 3 : 1, Reduction::pairwise).value,
                            dw.value),
              1e-12);
    EXPECT_EQ(reference::scatter_deconv2d(dy, w, g), dx.value);
  }
}

TEST(Properties, StrideDivisibleInputsCutSplitMacsBySquare) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_geometry(rng);
    g.ih = g.sh * ((g.ih + g.sh - 1) / g.sh);
    g.iw = g.sw * ((g.iw + g.sw - 1) / g.sw);
    g = infer(g);
    const auto dy = random_tensor<double>(g.output_dims(), rng);
    const auto w = random_tensor<double>(g.filter_dims(), rng);
    const auto split = ks_deconv(dy, ks_split(w, g), g).stats.macs;
    EXPECT_EQ(split * static_cast<std::uint64_t>(g.sh * g.sw), oracle_macs(g, OpKind::deconv)) << g.to_string();
  }
}

TEST(Dispatch, RoutesByPaddingAndStride) {
  const auto padded = infer({.ih = 8, .iw = 8, .fh = 3, .fw = 3, .sh = 2, .sw = 2, .ph = 1, .pw = 1});
  const auto unpadded = infer({.ih = 8, .iw = 8, .fh = 3, .fw = 3, .sh = 2, .sw = 2});
  const auto unit = infer({.ih = 8, .iw = 8, .fh = 3, .fw = 3, .ph = 1, .pw = 1});
  auto zeros = [](const ConvGeometry& g) {
    return std::tuple{Tensor4<double>(g.input_dims()), Tensor4<double>(g.filter_dims()),
                      Tensor4<double>(g.output_dims())};
  };
  {
    auto [x, w, dy] = zeros(padded);
    EXPECT_EQ(dispatch_conv(x, w, padded).algorithm, "conv_v2");
    EXPECT_EQ(dispatch_deconv(dy, w, padded).algorithm, "ks_deconv_v2");
    EXPECT_EQ(dispatch_dilated(x, dy, padded).algorithm, "sk_dilated_v2");
  }
  {
    auto [x, w, dy] = zeros(unpadded);
    EXPECT_EQ(dispatch_conv(x, w, unpadded).algorithm, "conv_direct");
    EXPECT_EQ(dispatch_deconv(dy, w, unpadded).algorithm, "ks_deconv");
    EXPECT_EQ(dispatch_dilated(x, dy, unpadded).algorithm, "sk_dilated");
  }
  {
    auto [x, w, dy] = zeros(unit);
    EXPECT_EQ(dispatch_deconv(dy, w, unit).algorithm, "deconv_unit_stride");
  }
}

TEST(Precision, SinglePrecisionTracksDouble) {
  std::mt19937_64 rng(99);
  const auto g = infer({.n = 2, .ih = 12, .iw = 12, .ic = 4, .oc = 3, .fh = 5, .fw = 5, .sh = 3, .sw = 3,
                        .ph = 2, .pw = 2});
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto w = random_tensor<double>(g.filter_dims(), rng);
  const auto xf = cast<float>(x);
  const auto wf = cast<float>(w);
  const auto y = reference::naive_conv2d(cast<double>(xf), cast<double>(wf), g).value;
  EXPECT_LT(max_rel_error(conv_v2(xf, wf, g).value, y), 1e-5);
}

}  // namespace
}  // namespace cks
