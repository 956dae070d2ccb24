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

#include "cks/geometry.hpp"
#include "cks/op_stats.hpp"
#include "cks/tensor.hpp"

// Serial reference operators. Each one materializes the zero-padded or
// zero-inserted tensors and counts every multiply-accumulate, zeros included.
// Accumulation order is fixed so that results are bit-reproducible.
namespace cks::reference {

// Y = conv(X, W). MACs = flops(conv) / 2.
template <Scalar T>
OpResult<T> naive_conv2d(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g);

// dX as a unit-stride convolution of the zero-inserted, re-padded dY against
// the rotated, channel-swapped filters. MACs = flops(deconv) / 2.
template <Scalar T>
OpResult<T> naive_deconv2d(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g);

// dX by scattering each output gradient back through the forward loop nest.
// Independent of naive_deconv2d; the two agree exactly.
template <Scalar T>
Tensor4<T> scatter_deconv2d(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g);

// dW as a convolution of the padded X by the zero-inserted dY used as filters.
// MACs = flops(dilated) / 2, batch factor included.
template <Scalar T>
OpResult<T> naive_dilated_conv2d(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g);

}  // namespace cks::reference
