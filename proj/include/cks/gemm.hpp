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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cks/geometry.hpp"
#include "cks/op_stats.hpp"
#include "cks/tensor.hpp"

namespace cks {

template <Scalar T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Rows are output positions (n, oh, ow); columns are (fh, fw, ic). Padded
// positions are stored as explicit zeros.
template <Scalar T>
using PatchMatrix = Matrix<T>;

template <Scalar T>
PatchMatrix<T> im2col(const Tensor4<T>& x, const ConvGeometry& g);

// C += A * B with a plain blocked triple loop. Each C entry accumulates its
// products in ascending k order regardless of the block size.
template <Scalar T>
void gemm(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c, std::size_t block = 64);

// Y = im2col(X) * reshape(W), with W reshaped to (F_H*F_W*I_C) x O_C.
template <Scalar T>
OpResult<T> gemm_conv2d(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g);

enum class Reduction {
  serial,    // partials folded in segment order; deterministic
  pairwise,  // tree fold of partials
};

/// dW with the reduction axis G_K = N*O_H*O_W split into `gz` contiguous,
/// near-equal segments. Each segment produces a partial dW using strided
/// reads of X (no zero-inserted dY), segments run concurrently, and partials
/// are then aggregated. With gz = 1 the result equals sk_dilated exactly.
///
/// Throws ParameterError unless 1 <= gz <= G_K.
template <Scalar T>
OpResult<T> partitioned_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g,
                                std::int64_t gz, Reduction reduction = Reduction::serial);

}  // namespace cks
