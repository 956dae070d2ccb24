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
#include <string>

#include <json.hpp>

#include "cks/tensor.hpp"

namespace cks {

/// Parameters of one 2-D conv layer in NHWC layout.
///
/// X is (n, ih, iw, ic), W is (oc, fh, fw, ic), Y is (n, oh, ow, oc).
/// oh/ow are derived by infer() and must not be set by hand.
struct ConvGeometry {
  std::int64_t n = 1;
  std::int64_t ih = 1;
  std::int64_t iw = 1;
  std::int64_t ic = 1;
  std::int64_t oc = 1;
  std::int64_t fh = 1;
  std::int64_t fw = 1;
  std::int64_t sh = 1;
  std::int64_t sw = 1;
  std::int64_t ph = 0;
  std::int64_t pw = 0;
  std::int64_t oh = 0;
  std::int64_t ow = 0;

  // Extents of dY after inserting (stride - 1) zeros between elements.
  std::int64_t oh_inserted() const noexcept { return oh + (oh - 1) * (sh - 1); }
  std::int64_t ow_inserted() const noexcept { return ow + (ow - 1) * (sw - 1); }

  Dims4 input_dims() const;
  Dims4 output_dims() const;
  Dims4 filter_dims() const;

  std::string to_string() const;

  friend bool operator==(const ConvGeometry&, const ConvGeometry&) = default;
};

// Validates g and fills oh/ow by the floor rule. Throws GeometryError.
ConvGeometry infer(ConvGeometry g);

// Proportion of padded zeros in the padded input.
double pad_zero_fraction(const ConvGeometry& g);

// Fraction of non-zero calculations left after zero insertion into dY.
double nonzero_calc_fraction(const ConvGeometry& g);

enum class OpKind { conv, deconv, dilated };

const char* to_string(OpKind kind);
OpKind op_kind_from_string(const std::string& s);

// Time complexity in flops (2 per MAC). The dilated count includes the batch factor.
std::uint64_t flops(const ConvGeometry& g, OpKind kind);

// The dilated-convolution formula exactly as tabulated, without the batch factor.
std::uint64_t dilated_flops_unbatched(const ConvGeometry& g);

// MACs executed by the zero-materializing reference operator.
inline std::uint64_t oracle_macs(const ConvGeometry& g, OpKind kind) { return flops(g, kind) / 2; }

struct GzPolicy {
  std::int64_t lower_bound = 1;
  std::int64_t upper_bound = 1;
};

// lower = 1, upper = available worker count.
GzPolicy default_gz_policy();

std::int64_t select_gz(std::int64_t n_alpha, std::int64_t n_beta, std::int64_t n_gamma,
                       const GzPolicy& policy);

// Work-block counts of the conv, deconv and dilated operators of one layer,
// measured in square output tiles of the lowered matrix products.
struct BlockCounts {
  std::int64_t conv = 0;
  std::int64_t deconv = 0;
  std::int64_t dilated = 0;
};

BlockCounts work_blocks(const ConvGeometry& g, std::int64_t tile = 32);

// Throws ShapeError naming `what` when dims differ.
void require_dims(const Dims4& actual, const Dims4& expected, const char* what);

void to_json(nlohmann::json& j, const ConvGeometry& g);
void from_json(const nlohmann::json& j, ConvGeometry& g);

}  // namespace cks
