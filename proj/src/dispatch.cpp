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

#include "cks/ops.hpp"

namespace cks {

template <Scalar T>
OpResult<T> dispatch_conv(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g,
                          const DispatchPolicy& policy) {
  if (pad_zero_fraction(g) > policy.trim_threshold) return conv_v2(x, w, g);
  return conv_direct(x, w, g);
}

template <Scalar T>
OpResult<T> dispatch_deconv(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g,
                            const DispatchPolicy& policy, const KernelSplit<T>* cached) {
  // Dense input at unit stride: nothing to split.
  if (g.sh == 1 && g.sw == 1) return deconv_unit_stride(dy, w, g);
  KernelSplit<T> local;
  if (cached == nullptr) {
    local = ks_split(w, g);
    cached = &local;
  }
  if (pad_zero_fraction(g) > policy.trim_threshold) return ks_deconv_v2(dy, *cached, g);
  return ks_deconv(dy, *cached, g);
}

template <Scalar T>
OpResult<T> dispatch_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g,
                             const DispatchPolicy& policy) {
  if (pad_zero_fraction(g) > policy.trim_threshold) return sk_dilated_v2(x, dy, g);
  return sk_dilated(x, dy, g);
}

#define CKS_INSTANTIATE_DISPATCH(T)                                                                     \
  template OpResult<T> dispatch_conv(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&,        \
                                     const DispatchPolicy&);                                           \
  template OpResult<T> dispatch_deconv(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&,      \
                                       const DispatchPolicy&, const KernelSplit<T>*);                  \
  template OpResult<T> dispatch_dilated(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&,     \
                                        const DispatchPolicy&);

CKS_INSTANTIATE_DISPATCH(float)
CKS_INSTANTIATE_DISPATCH(double)

#undef CKS_INSTANTIATE_DISPATCH

}  // namespace cks
