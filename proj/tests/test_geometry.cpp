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

#include <sstream>

#include "cks/analyze.hpp"
#include "cks/geometry.hpp"

namespace cks {
namespace {

TEST(Geometry, FloorRuleForOutputExtents) {
  const auto g = infer({.ih = 7, .iw = 8, .fh = 3, .fw = 2, .sh = 2, .sw = 3, .ph = 1, .pw = 0});
  EXPECT_EQ(g.oh, 4);
  EXPECT_EQ(g.ow, 3);
  EXPECT_EQ(g.oh_inserted(), 7);
  EXPECT_EQ(g.ow_inserted(), 7);
  EXPECT_EQ(g.input_dims(), (Dims4{1, 7, 8, 1}));
  EXPECT_EQ(g.output_dims(), (Dims4{1, 4, 3, 1}));
}

TEST(Geometry, InvalidLayersThrow) {
  EXPECT_THROW(infer({.ih = 0}), GeometryError);
  EXPECT_THROW(infer({.sh = 0}), GeometryError);
  EXPECT_THROW(infer({.ph = -1}), GeometryError);
  EXPECT_THROW(infer({.ih = 2, .iw = 2, .fh = 5, .fw = 1}), GeometryError);
  EXPECT_THROW(infer({.ih = 4, .iw = 4, .fh = 3, .fw = 3, .ph = 3, .pw = 0}), GeometryError);
}

TEST(Geometry, FlopFormulas) {
  const auto g = infer({.n = 2, .ih = 6, .iw = 6, .ic = 3, .oc = 4, .fh = 3, .fw = 3, .sh = 2, .sw = 2,
                        .ph = 1, .pw = 1});
  ASSERT_EQ(g.oh, 3);
  EXPECT_EQ(flops(g, OpKind::conv), 2u * 2 * 3 * 3 * 4 * 3 * 3 * 3);
  EXPECT_EQ(flops(g, OpKind::dilated), 2u * 4 * 3 * 3 * 3 * 2 * 5 * 5);
  EXPECT_EQ(dilated_flops_unbatched(g), 2u * 4 * 3 * 3 * 3 * 5 * 5);
  EXPECT_EQ(oracle_macs(g, OpKind::conv) * 2, flops(g, OpKind::conv));
}

TEST(Geometry, ZeroFractions) {
  const auto g = infer({.ih = 32, .iw = 32, .fh = 3, .fw = 3, .ph = 1, .pw = 1});
  EXPECT_NEAR(pad_zero_fraction(g), 1.0 - 1024.0 / 1156.0, 1e-12);
  const auto strided = infer({.ih = 15, .iw = 15, .fh = 3, .fw = 3, .sh = 2, .sw = 2, .ph = 1, .pw = 1});
  ASSERT_EQ(strided.oh, 8);
  EXPECT_NEAR(nonzero_calc_fraction(strided), 64.0 / 225.0, 1e-15);
  EXPECT_EQ(nonzero_calc_fraction(infer({.ih = 5, .iw = 5, .fh = 3, .fw = 3})), 1.0);
}

TEST(Geometry, SegmentCountSelection) {
  EXPECT_EQ(select_gz(1, 1, 1, {1, 4}), 2);
  EXPECT_EQ(select_gz(10, 10, 1, {1, 4}), 4);
  EXPECT_EQ(select_gz(1, 1, 100, {3, 8}), 3);
  EXPECT_THROW(select_gz(0, 1, 1, {1, 4}), ParameterError);
  EXPECT_THROW(select_gz(1, 1, 1, {5, 4}), ParameterError);
  EXPECT_GE(default_gz_policy().upper_bound, 1);
}

TEST(Geometry, JsonRoundTrip) {
  const auto g = infer({.n = 2, .ih = 9, .iw = 7, .ic = 3, .oc = 5, .fh = 3, .fw = 2, .sh = 2, .ph = 1});
  const nlohmann::json j = g;
  EXPECT_EQ(j.get<ConvGeometry>(), g);
  auto bad = j;
  bad["fh"] = 40;
  EXPECT_THROW(bad.get<ConvGeometry>(), GeometryError);
}

TEST(Geometry, OpKindNames) {
  for (auto k : {OpKind::conv, OpKind::deconv, OpKind::dilated}) EXPECT_EQ(op_kind_from_string(to_string(k)), k);
  EXPECT_THROW(op_kind_from_string("pool"), ParameterError);
}

TEST(Analyze, PadFractionIncreasesWithPadding) {
  const auto points = analyze_curve(CurveKind::pad_fraction, parse_range("8:64"), {{"p", 2}});
  ASSERT_EQ(points.size(), 57u);
  const auto by_size = analyze_curve(CurveKind::pad_fraction, parse_range("32:32"));
  EXPECT_NEAR(by_size[0].fraction, 1.0 - 1024.0 / 1156.0, 1e-12);
  // Smaller inputs carry proportionally more padding.
  for (std::size_t i = 1; i < points.size(); ++i) EXPECT_LT(points[i].fraction, points[i - 1].fraction);
}

TEST(Analyze, NonzeroFractionFallsWithStride) {
  const auto points = analyze_curve(CurveKind::insert_fraction, parse_range("1:6"));
  EXPECT_EQ(points[0].fraction, 1.0);
  EXPECT_NEAR(points[1].fraction, 64.0 / 225.0, 1e-15);
  for (std::size_t i = 1; i < points.size(); ++i) EXPECT_LT(points[i].fraction, points[i - 1].fraction);
}

TEST(Analyze, BadInput) {
  EXPECT_THROW(parse_range("3"), ParameterError);
  EXPECT_THROW(parse_range("a:4"), ParameterError);
  EXPECT_THROW(parse_range("1:4x"), ParameterError);
  EXPECT_THROW(analyze_curve(CurveKind::pad_fraction, {1, 4}, {{"q", 1}}), ParameterError);
  EXPECT_THROW(analyze_curve(CurveKind::insert_fraction, {0, 2}), ParameterError);
  EXPECT_THROW(curve_kind_from_string("other"), ParameterError);
}

TEST(Analyze, CsvHeader) {
  std::ostringstream os;
  write_curve_csv(os, CurveKind::insert_fraction, analyze_curve(CurveKind::insert_fraction, {1, 1}));
  EXPECT_EQ(os.str(), "stride,nonzero_calc_fraction\n1,1\n");
}

}  // namespace
}  // namespace cks
