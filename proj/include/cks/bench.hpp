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
#include <string>
#include <vector>

#include <json.hpp>

#include "cks/geometry.hpp"

namespace cks {

enum class Dtype { f32, f64 };

const char* to_string(Dtype dtype);
Dtype dtype_from_string(const std::string& s);

// Eight layers per suite: spatial size shrinks from case 1 to case 8 while
// channels and batch grow. All cases use stride 2 with even input extents.
//   "paper-3x3": F = 3, p = 1        "paper-5x5": F = 5, p = 2
// Throws ParameterError for other names.
std::vector<ConvGeometry> suite_geometries(const std::string& suite);

struct BenchConfig {
  std::vector<ConvGeometry> geometries;
  std::vector<OpKind> ops{OpKind::conv, OpKind::deconv, OpKind::dilated};
  int reps = 10;
  Dtype dtype = Dtype::f32;
  bool deterministic = true;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int case_index = 0;  // 1-based
  OpKind op = OpKind::conv;
  std::string impl;       // naive | cks | gemm
  std::string algorithm;  // concrete routine
  ConvGeometry geometry;
  Dtype dtype = Dtype::f32;
  int reps = 0;
  double mean_seconds = 0;
  std::uint64_t flops = 0;            // time-complexity formula, batch included
  std::uint64_t flops_unbatched = 0;  // dilated formula as tabulated (no batch factor); = flops otherwise
  double gflops = 0;                  // flops / (mean_seconds * 1e9)
  std::uint64_t macs = 0;
  std::uint64_t zeros_skipped = 0;
  double checksum = 0;  // sum of the operator's output elements
};

// One warm-up call, then `reps` timed calls per (case, op, implementation).
// Throws ParameterError when reps < 1.
std::vector<BenchRow> run_bench(const BenchConfig& config);

// Timing columns (mean_seconds, gflops) are dropped when include_timing is false.
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool include_timing = true);
nlohmann::json bench_json(const std::vector<BenchRow>& rows, bool include_timing = true);

}  // namespace cks
