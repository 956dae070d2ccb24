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

#include "cks/geometry.hpp"
#include "cks/op_stats.hpp"
#include "cks/tensor.hpp"

// Zero-skipping convolution operators.
//
// Every operator returns the same values as its counterpart in
// cks::reference, summed in the same per-element order, so 64-bit results
// compare exactly. OpStats::zeros_skipped is measured against the reference
// MAC count. All kernels are OpenMP-parallel over disjoint output elements;
// results do not depend on the thread count.
namespace cks {

enum class FilterLayout {
  oc_fh_fw_ic,  // as stored
  fh_fw_ic_oc,  // transposed once per call, vectorizes over output channels
};

// Direct convolution; padding is handled by conditional loads that return
// zero, and those zero terms are still executed.
template <Scalar T>
OpResult<T> conv_direct(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g);

// Convolution with per-window filter trimming: loops over each window only
// touch the rectangle that overlaps the unpadded input, so no padded zero is
// read and no bounds check runs inside the reduction.
template <Scalar T>
OpResult<T> conv_v2(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g,
                    FilterLayout layout = FilterLayout::oc_fh_fw_ic);

/// Filters rotated by 180 degrees and split into sh*sw smaller kernels, one
/// per residue class of input coordinates modulo the stride.
///
/// `c` has dims (sh, sw, O_C, ceil(F_H/sh), ceil(F_W/sw), I_C). Kernel (y, x)
/// occupies the leading extent_h(y) x extent_w(x) slots; the rest are zero.
template <Scalar T>
struct KernelSplit {
  Tensor6<T> c;
  std::int64_t sh = 1;
  std::int64_t sw = 1;
  std::int64_t fh = 1;
  std::int64_t fw = 1;

  // ceil((F_H - y) / sh); zero when y >= F_H.
  std::int64_t extent_h(std::int64_t y) const noexcept { return y >= fh ? 0 : (fh - y + sh - 1) / sh; }
  std::int64_t extent_w(std::int64_t x) const noexcept { return x >= fw ? 0 : (fw - x + sw - 1) / sw; }
};

template <Scalar T>
KernelSplit<T> ks_split(const Tensor4<T>& w, const ConvGeometry& g);

// Kernel-split deconvolution: each smaller kernel runs a unit-stride
// convolution over the dense dY and writes its residue class of dX. Window
// positions that fall in the kernel's zero border are loaded as zero and
// still executed.
template <Scalar T>
OpResult<T> ks_deconv(const Tensor4<T>& dy, const KernelSplit<T>& ks, const ConvGeometry& g);

// ks_deconv with the kernels trimmed to the part of each window inside dY.
template <Scalar T>
OpResult<T> ks_deconv_v2(const Tensor4<T>& dy, const KernelSplit<T>& ks, const ConvGeometry& g);

// Unit-stride deconvolution straight from W (no split tensor). sh = sw = 1 only.
template <Scalar T>
OpResult<T> deconv_unit_stride(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g);

// Weight gradient that reads X with a step equal to the stride instead of
// building a zero-inserted dY. Out-of-range X positions load as zero and are
// still executed.
template <Scalar T>
OpResult<T> sk_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g);

// sk_dilated with the output-window range precomputed per filter tap, so
// padded positions are never visited.
template <Scalar T>
OpResult<T> sk_dilated_v2(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g);

struct DispatchPolicy {
  // Trimming variants are used when pad_zero_fraction exceeds this.
  double trim_threshold = 0.06;
};

template <Scalar T>
OpResult<T> dispatch_conv(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g,
                          const DispatchPolicy& policy = {});

// `cached` may hold a split built from the same filters; it is built per call otherwise.
template <Scalar T>
OpResult<T> dispatch_deconv(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g,
                            const DispatchPolicy& policy = {}, const KernelSplit<T>* cached = nullptr);

template <Scalar T>
OpResult<T> dispatch_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g,
                             const DispatchPolicy& policy = {});

}  // namespace cks
