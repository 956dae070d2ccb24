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

#include "cks/analyze.hpp"

#include <charconv>
#include <ostream>
#include <set>

#include "cks/errors.hpp"
#include "cks/geometry.hpp"

namespace cks {

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "pad-fraction") return CurveKind::pad_fraction;
  if (s == "insert-fraction") return CurveKind::insert_fraction;
  throw ParameterError("unknown analysis kind: " + s);
}

SweepRange parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParameterError("range must look like A:B, got '" + text + "'");
  auto parse = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || end != part.data() + part.size()) {
      throw ParameterError("range must look like A:B, got '" + text + "'");
    }
    return v;
  };
  const std::string_view view(text);
  return {parse(view.substr(0, colon)), parse(view.substr(colon + 1))};
}

namespace {

std::int64_t lookup(const std::map<std::string, std::int64_t>& fixed, const std::string& key, std::int64_t fallback) {
  const auto it = fixed.find(key);
  return it == fixed.end() ? fallback : it->second;
}

}  // namespace

std::vector<CurvePoint> analyze_curve(CurveKind kind, SweepRange range,
                                      const std::map<std::string, std::int64_t>& fixed) {
  const std::set<std::string> allowed =
      kind == CurveKind::pad_fraction ? std::set<std::string>{"f", "p", "s"} : std::set<std::string>{"o", "f", "p"};
  for (const auto& [key, value] : fixed) {
    if (!allowed.contains(key)) throw ParameterError("unknown fixed parameter '" + key + "'");
  }
  const std::int64_t f = lookup(fixed, "f", 3);
  const std::int64_t p = lookup(fixed, "p", 1);
  const std::int64_t step = range.to >= range.from ? 1 : -1;

  std::vector<CurvePoint> points;
  try {
    for (std::int64_t v = range.from;; v += step) {
      if (kind == CurveKind::pad_fraction) {
        const std::int64_t s = lookup(fixed, "s", 1);
        const auto g = infer({.ih = v, .iw = v, .fh = f, .fw = f, .sh = s, .sw = s, .ph = p, .pw = p});
        points.push_back({v, pad_zero_fraction(g)});
      } else {
        // Smallest input that yields o x o outputs at stride v.
        const std::int64_t o = lookup(fixed, "o", 8);
        const std::int64_t size = (o - 1) * v + f - 2 * p;
        const auto g = infer({.ih = size, .iw = size, .fh = f, .fw = f, .sh = v, .sw = v, .ph = p, .pw = p});
        if (g.oh != o) throw ParameterError("cannot realize " + std::to_string(o) + " outputs");
        points.push_back({v, nonzero_calc_fraction(g)});
      }
      if (v == range.to) break;
    }
  } catch (const GeometryError& e) {
    throw ParameterError(std::string("sweep point is not a valid layer: ") + e.what());
  }
  return points;
}

void write_curve_csv(std::ostream& os, CurveKind kind, const std::vector<CurvePoint>& points) {
  const auto old = os.precision(17);
  os << (kind == CurveKind::pad_fraction ? "input_size,pad_zero_fraction\n" : "stride,nonzero_calc_fraction\n");
  for (const auto& p : points) os << p.parameter << ',' << p.fraction << '\n';
  os.precision(old);
}

}  // namespace cks
