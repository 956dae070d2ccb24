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
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cks/geometry.hpp"
#include "cks/op_stats.hpp"
#include "cks/tensor.hpp"

namespace cks {

// Draws a valid geometry from the randomized test grid: I in 4..12,
// F in {1,2,3,5,7}, stride 1..4, padding 0..3 below F, channels in {1,3,4},
// batch in {1,2}. Height and width are drawn independently.
ConvGeometry random_geometry(std::mt19937_64& rng);

template <Scalar T>
Tensor4<T> random_tensor(const Dims4& dims, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0);

// max|a - b| / max|b|, or max|a - b| when b is all zeros.
template <Scalar A, Scalar B>
double max_rel_error(const Tensor4<A>& a, const Tensor4<B>& b);

template <Scalar T>
double inner_product(const Tensor4<T>& a, const Tensor4<T>& b);

// An operator checked against the reference of its kind. The two tensor
// arguments follow the reference signature: (x, w) for conv, (dy, w) for
// deconv, (x, dy) for dilated.
struct OpUnderTest {
  using Run64 = std::function<OpResult<double>(const Tensor4<double>&, const Tensor4<double>&, const ConvGeometry&)>;
  using Run32 = std::function<OpResult<float>(const Tensor4<float>&, const Tensor4<float>&, const ConvGeometry&)>;
  // Returns a failure reason when a MAC-count law does not hold.
  using MacRule = std::function<std::optional<std::string>(const ConvGeometry&, const OpStats& own,
                                                           const OpStats& reference)>;

  std::string name;
  OpKind kind = OpKind::conv;
  Run64 run64;
  Run32 run32;
  bool exact = true;            // 64-bit result must equal the reference exactly
  double tolerance64 = 1e-12;   // used when !exact
  MacRule mac_rule;
};

std::vector<OpUnderTest> default_ops();

struct VerifyOptions {
  std::uint64_t seed = 0;
  int cases = 100;
  double tolerance32 = 1e-5;
  double adjoint_tolerance = 1e-10;
};

struct VerifyResult {
  bool ok = true;
  nlohmann::json summary;
};

// Runs every op on `cases` random geometries and checks values (64- and
// 32-bit), MAC accounting, the two reference deconvolution forms, and the
// adjoint identities. The summary carries no timings.
VerifyResult run_verify(const VerifyOptions& options, const std::vector<OpUnderTest>& ops = default_ops());

}  // namespace cks
