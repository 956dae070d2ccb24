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

#include <algorithm>
#include <vector>

#include "cks/ops.hpp"
#include "kernel_util.hpp"

namespace cks {

using detail::ceil_div;
using detail::u;

namespace {

// One worker owns every (oc, ic) of a filter tap (fh, fw), so writes to dW
// never overlap. The per-element sum runs over (n, oh, ow) in ascending order.
template <bool Trim, Scalar T>
OpResult<T> sk_dilated_impl(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g, const char* name) {
  require_dims(x.dims(), g.input_dims(), name);
  require_dims(dy.dims(), g.output_dims(), name);
  Tensor4<T> dw(g.filter_dims());
  const T* xd = x.data().data();
  const T* dyd = dy.data().data();
  T* dwd = dw.data().data();
  const std::vector<T> zeros(u(g.ic), T(0));
  const std::int64_t taps = g.fh * g.fw;
  std::uint64_t macs = 0;

#pragma omp parallel reduction(+ : macs)
  {
    std::vector<T> acc(u(g.oc * g.ic));
#pragma omp for schedule(static)
    for (std::int64_t tap = 0; tap < taps; ++tap) {
      const std::int64_t fh = tap / g.fw;
      const std::int64_t fw = tap % g.fw;
      const std::int64_t ih_s = fh - g.ph;
      const std::int64_t iw_s = fw - g.pw;
      std::int64_t oh_s = 0, oh_e = g.oh, ow_s = 0, ow_e = g.ow;
      if constexpr (Trim) {
        // Rows oh with 0 <= oh*sh + ih_s < I_H.
        oh_s = std::max<std::int64_t>(ceil_div(-ih_s, g.sh), 0);
        oh_e = std::min(g.oh, ceil_div(g.ih - ih_s, g.sh));
        ow_s = std::max<std::int64_t>(ceil_div(-iw_s, g.sw), 0);
        ow_e = std::min(g.ow, ceil_div(g.iw - iw_s, g.sw));
      }
      std::fill(acc.begin(), acc.end(), T(0));
      if (oh_e > oh_s && ow_e > ow_s) {
        macs += u(g.n * (oh_e - oh_s) * (ow_e - ow_s) * g.oc * g.ic);
        for (std::int64_t n = 0; n < g.n; ++n)
          for (std::int64_t oh = oh_s; oh < oh_e; ++oh) {
            const std::int64_t ih = oh * g.sh + ih_s;
            for (std::int64_t ow = ow_s; ow < ow_e; ++ow) {
              const std::int64_t iw = ow * g.sw + iw_s;
              const T* xp;
              if constexpr (Trim) {
                xp = xd + x.offset({u(n), u(ih), u(iw), 0});
              } else {
                const bool inside = ih >= 0 && ih < g.ih && iw >= 0 && iw < g.iw;
                xp = inside ? xd + x.offset({u(n), u(ih), u(iw), 0}) : zeros.data();
              }
              const T* grad = dyd + dy.offset({u(n), u(oh), u(ow), 0});
              for (std::int64_t oc = 0; oc < g.oc; ++oc) {
                const T d = grad[oc];
                T* a = acc.data() + oc * g.ic;
                for (std::int64_t ic = 0; ic < g.ic; ++ic) a[ic] += xp[ic] * d;
              }
            }
          }
      }
      for (std::int64_t oc = 0; oc < g.oc; ++oc) {
        std::copy_n(acc.data() + oc * g.ic, g.ic, dwd + dw.offset({u(oc), u(fh), u(fw), 0}));
      }
    }
  }
  const auto total = oracle_macs(g, OpKind::dilated);
  return {std::move(dw), OpStats{macs, total - macs}, name};
}

}  // namespace

template <Scalar T>
OpResult<T> sk_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g) {
  return sk_dilated_impl<false>(x, dy, g, "sk_dilated");
}

template <Scalar T>
OpResult<T> sk_dilated_v2(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g) {
  return sk_dilated_impl<true>(x, dy, g, "sk_dilated_v2");
}

template OpResult<float> sk_dilated(const Tensor4<float>&, const Tensor4<float>&, const ConvGeometry&);
template OpResult<double> sk_dilated(const Tensor4<double>&, const Tensor4<double>&, const ConvGeometry&);
template OpResult<float> sk_dilated_v2(const Tensor4<float>&, const Tensor4<float>&, const ConvGeometry&);
template OpResult<double> sk_dilated_v2(const Tensor4<double>&, const Tensor4<double>&, const ConvGeometry&);

}  // namespace cks
