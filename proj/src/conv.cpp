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

using detail::u;

template <Scalar T>
OpResult<T> conv_direct(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(x.dims(), g.input_dims(), "conv_direct input");
  require_dims(w.dims(), g.filter_dims(), "conv_direct filters");
  Tensor4<T> y(g.output_dims());
  const T* xd = x.data().data();
  const T* wd = w.data().data();
  T* yd = y.data().data();
  const std::vector<T> zeros(u(g.ic), T(0));
  const std::int64_t cells = g.n * g.oh * g.ow;

#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::int64_t n = cell / (g.oh * g.ow);
    const std::int64_t oh = cell / g.ow % g.oh;
    const std::int64_t ow = cell % g.ow;
    const std::int64_t ih_s = oh * g.sh - g.ph;
    const std::int64_t iw_s = ow * g.sw - g.pw;
    for (std::int64_t oc = 0; oc < g.oc; ++oc) {
      T acc = 0;
      for (std::int64_t fh = 0; fh < g.fh; ++fh) {
        const std::int64_t ih = ih_s + fh;
        for (std::int64_t fw = 0; fw < g.fw; ++fw) {
          const std::int64_t iw = iw_s + fw;
          const bool inside = ih >= 0 && ih < g.ih && iw >= 0 && iw < g.iw;
          const T* xp = inside ? xd + x.offset({u(n), u(ih), u(iw), 0}) : zeros.data();
          const T* wp = wd + w.offset({u(oc), u(fh), u(fw), 0});
          for (std::int64_t ic = 0; ic < g.ic; ++ic) acc += xp[ic] * wp[ic];
        }
      }
      yd[y.offset({u(n), u(oh), u(ow), u(oc)})] = acc;
    }
  }
  const auto total = oracle_macs(g, OpKind::conv);
  return {std::move(y), OpStats{total, 0}, "conv_direct"};
}

template <Scalar T>
OpResult<T> conv_v2(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g, FilterLayout layout) {
  require_dims(x.dims(), g.input_dims(), "conv_v2 input");
  require_dims(w.dims(), g.filter_dims(), "conv_v2 filters");
  Tensor4<T> y(g.output_dims());
  const Tensor4<T> wt = layout == FilterLayout::fh_fw_ic_oc ? transpose_filters(w) : Tensor4<T>();
  const T* xd = x.data().data();
  const T* wd = w.data().data();
  const T* wtd = wt.data().data();
  T* yd = y.data().data();
  const std::int64_t cells = g.n * g.oh * g.ow;
  std::uint64_t macs = 0;

#pragma omp parallel reduction(+ : macs)
  {
    std::vector<T> acc(u(g.oc));
#pragma omp for schedule(static)
    for (std::int64_t cell = 0; cell < cells; ++cell) {
      const std::int64_t n = cell / (g.oh * g.ow);
      const std::int64_t oh = cell / g.ow % g.oh;
      const std::int64_t ow = cell % g.ow;
      const std::int64_t ih_s = oh * g.sh - g.ph;
      const std::int64_t iw_s = ow * g.sw - g.pw;
      // Trimmed filter rectangle [fh_s, fh_e) x [fw_s, fw_e).
      const std::int64_t fh_s = std::max<std::int64_t>(-ih_s, 0);
      const std::int64_t fh_e = std::min(g.ih - ih_s, g.fh);
      const std::int64_t fw_s = std::max<std::int64_t>(-iw_s, 0);
      const std::int64_t fw_e = std::min(g.iw - iw_s, g.fw);
      T* out = yd + y.offset({u(n), u(oh), u(ow), 0});
      if (fh_e <= fh_s || fw_e <= fw_s) {
        std::fill_n(out, g.oc, T(0));
        continue;
      }
      const std::int64_t row = (fw_e - fw_s) * g.ic;
      macs += u((fh_e - fh_s) * row * g.oc);

      if (layout == FilterLayout::oc_fh_fw_ic) {
        // (fw, ic) is contiguous in both X and W for a fixed fh.
        for (std::int64_t oc = 0; oc < g.oc; ++oc) {
          T sum = 0;
          for (std::int64_t fh = fh_s; fh < fh_e; ++fh) {
            const T* xp = xd + x.offset({u(n), u(ih_s + fh), u(iw_s + fw_s), 0});
            const T* wp = wd + w.offset({u(oc), u(fh), u(fw_s), 0});
            for (std::int64_t k = 0; k < row; ++k) sum += xp[k] * wp[k];
          }
          out[oc] = sum;
        }
      } else {
        std::fill(acc.begin(), acc.end(), T(0));
        for (std::int64_t fh = fh_s; fh < fh_e; ++fh) {
          const T* xp = xd + x.offset({u(n), u(ih_s + fh), u(iw_s + fw_s), 0});
          const T* wp = wtd + wt.offset({u(fh), u(fw_s), 0, 0});
          for (std::int64_t k = 0; k < row; ++k) {
            const T xv = xp[k];
            const T* wk = wp + k * g.oc;
            for (std::int64_t oc = 0; oc < g.oc; ++oc) acc[u(oc)] += xv * wk[oc];
          }
        }
        std::copy(acc.begin(), acc.end(), out);
      }
    }
  }
  const auto total = oracle_macs(g, OpKind::conv);
  return {std::move(y), OpStats{macs, total - macs}, "conv_v2"};
}

template OpResult<float> conv_direct(const Tensor4<float>&, const Tensor4<float>&, const ConvGeometry&);
template OpResult<double> conv_direct(const Tensor4<double>&, const Tensor4<double>&, const ConvGeometry&);
template OpResult<float> conv_v2(const Tensor4<float>&, const Tensor4<float>&, const ConvGeometry&, FilterLayout);
template OpResult<double> conv_v2(const Tensor4<double>&, const Tensor4<double>&, const ConvGeometry&,
                                  FilterLayout);

}  // namespace cks
