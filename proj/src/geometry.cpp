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

#include "cks/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "cks/errors.hpp"

namespace cks {

namespace {

std::size_t u(std::int64_t v) { return static_cast<std::size_t>(v); }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

Dims4 ConvGeometry::input_dims() const { return {u(n), u(ih), u(iw), u(ic)}; }
Dims4 ConvGeometry::output_dims() const { return {u(n), u(oh), u(ow), u(oc)}; }
Dims4 ConvGeometry::filter_dims() const { return {u(oc), u(fh), u(fw), u(ic)}; }

std::string ConvGeometry::to_string() const {
  std::ostringstream os;
  os << "n=" << n << " ih=" << ih << " iw=" << iw << " ic=" << ic << " oc=" << oc << " fh=" << fh
     << " fw=" << fw << " sh=" << sh << " sw=" << sw << " ph=" << ph << " pw=" << pw << " oh=" << oh
     << " ow=" << ow;
  return os.str();
}

ConvGeometry infer(ConvGeometry g) {
  auto fail = [&](const std::string& why) { throw GeometryError(why + " [" + g.to_string() + "]"); };
  if (g.n < 1 || g.ih < 1 || g.iw < 1 || g.ic < 1 || g.oc < 1 || g.fh < 1 || g.fw < 1) {
    fail("extents must be positive");
  }
  if (g.sh < 1 || g.sw < 1) fail("strides must be >= 1");
  if (g.ph < 0 || g.pw < 0) fail("padding must be non-negative");
  if (g.ph >= g.fh || g.pw >= g.fw) fail("padding must be smaller than the filter");
  if (g.fh > g.ih + 2 * g.ph || g.fw > g.iw + 2 * g.pw) fail("filter exceeds padded input");
  g.oh = (g.ih + 2 * g.ph - g.fh) / g.sh + 1;
  g.ow = (g.iw + 2 * g.pw - g.fw) / g.sw + 1;
  return g;
}

double pad_zero_fraction(const ConvGeometry& g) {
  const double inner = static_cast<double>(g.ih * g.iw);
  const double padded = static_cast<double>((g.ih + 2 * g.ph) * (g.iw + 2 * g.pw));
  return 1.0 - inner / padded;
}

double nonzero_calc_fraction(const ConvGeometry& g) {
  return static_cast<double>(g.oh * g.ow) / static_cast<double>(g.oh_inserted() * g.ow_inserted());
}

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::conv:
      return "conv";
    case OpKind::deconv:
      return "deconv";
    case OpKind::dilated:
      return "dilated";
  }
  return "?";
}

OpKind op_kind_from_string(const std::string& s) {
  if (s == "conv") return OpKind::conv;
  if (s == "deconv") return OpKind::deconv;
  if (s == "dilated") return OpKind::dilated;
  throw ParameterError("unknown operator kind: " + s);
}

std::uint64_t flops(const ConvGeometry& g, OpKind kind) {
  auto v = [](std::int64_t x) { return static_cast<std::uint64_t>(x); };
  switch (kind) {
    case OpKind::conv:
      return 2 * v(g.oc) * v(g.n) * v(g.oh) * v(g.ow) * v(g.fh) * v(g.fw) * v(g.ic);
    case OpKind::deconv:
      return 2 * v(g.ic) * v(g.n) * v(g.ih) * v(g.iw) * v(g.fh) * v(g.fw) * v(g.oc);
    case OpKind::dilated:
      return dilated_flops_unbatched(g) * v(g.n);
  }
  return 0;
}

std::uint64_t dilated_flops_unbatched(const ConvGeometry& g) {
  auto v = [](std::int64_t x) { return static_cast<std::uint64_t>(x); };
  return 2 * v(g.oc) * v(g.fh) * v(g.fw) * v(g.ic) * v(g.oh_inserted()) * v(g.ow_inserted());
}

GzPolicy default_gz_policy() {
  return GzPolicy{1, std::max<std::int64_t>(1, omp_get_max_threads())};
}

std::int64_t select_gz(std::int64_t n_alpha, std::int64_t n_beta, std::int64_t n_gamma,
                       const GzPolicy& policy) {
  if (n_alpha < 1 || n_beta < 1 || n_gamma < 1) throw ParameterError("select_gz: block counts must be positive");
  if (policy.lower_bound < 1 || policy.lower_bound > policy.upper_bound) {
    throw ParameterError("select_gz: need 1 <= lower_bound <= upper_bound");
  }
  const double ratio = static_cast<double>(n_alpha + n_beta) / static_cast<double>(n_gamma);
  return std::clamp<std::int64_t>(std::llround(ratio), policy.lower_bound, policy.upper_bound);
}

BlockCounts work_blocks(const ConvGeometry& g, std::int64_t tile) {
  auto blocks = [tile](std::int64_t rows, std::int64_t cols) {
    return ceil_div(rows, tile) * ceil_div(cols, tile);
  };
  return BlockCounts{blocks(g.n * g.oh * g.ow, g.oc), blocks(g.n * g.ih * g.iw, g.ic),
                     blocks(g.oc, g.fh * g.fw * g.ic)};
}

void require_dims(const Dims4& actual, const Dims4& expected, const char* what) {
  if (actual != expected) {
    std::ostringstream os;
    os << what << ": dims (" << actual[0] << ',' << actual[1] << ',' << actual[2] << ',' << actual[3]
       << ") but geometry requires (" << expected[0] << ',' << expected[1] << ',' << expected[2] << ','
       << expected[3] << ')';
    throw ShapeError(os.str());
  }
}

void to_json(nlohmann::json& j, const ConvGeometry& g) {
  j = nlohmann::json{{"n", g.n},   {"ih", g.ih}, {"iw", g.iw}, {"ic", g.ic}, {"oc", g.oc}, {"fh", g.fh},
                     {"fw", g.fw}, {"sh", g.sh}, {"sw", g.sw}, {"ph", g.ph}, {"pw", g.pw}};
}

void from_json(const nlohmann::json& j, ConvGeometry& g) {
  ConvGeometry raw;
  j.at("n").get_to(raw.n);
  j.at("ih").get_to(raw.ih);
  j.at("iw").get_to(raw.iw);
  j.at("ic").get_to(raw.ic);
  j.at("oc").get_to(raw.oc);
  j.at("fh").get_to(raw.fh);
  j.at("fw").get_to(raw.fw);
  j.at("sh").get_to(raw.sh);
  j.at("sw").get_to(raw.sw);
  j.at("ph").get_to(raw.ph);
  j.at("pw").get_to(raw.pw);
  g = infer(raw);
}

}  // namespace cks
