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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cks {

enum class CurveKind {
  pad_fraction,     // parameter: square input size I; fixed keys f (3), p (1), s (1)
  insert_fraction,  // parameter: stride on both axes; fixed keys o (8), f (3), p (1)
};

CurveKind curve_kind_from_string(const std::string& s);

// Inclusive sweep "A:B"; either direction.
struct SweepRange {
  std::int64_t from = 0;
  std::int64_t to = 0;
};

// Throws ParameterError on anything but two integers around a colon.
SweepRange parse_range(const std::string& text);

struct CurvePoint {
  std::int64_t parameter = 0;
  double fraction = 0;
};

// Zero-proportion curve over the range, in sweep order. Throws
// ParameterError for unknown fixed keys or a geometry the sweep cannot
// realize.
std::vector<CurvePoint> analyze_curve(CurveKind kind, SweepRange range,
                                      const std::map<std::string, std::int64_t>& fixed = {});

void write_curve_csv(std::ostream& os, CurveKind kind, const std::vector<CurvePoint>& points);

}  // namespace cks
