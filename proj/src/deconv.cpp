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
#include <string>
#include <vector>

#include "cks/ops.hpp"
#include "kernel_util.hpp"

namespace cks {

using detail::ceil_div;
using detail::u;

template <Scalar T>
KernelSplit<T> ks_split(const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(w.dims(), g.filter_dims(), "ks_split filters");
  KernelSplit<T> ks;
  ks.sh = g.sh;
  ks.sw = g.sw;
  ks.fh = g.fh;
  ks.fw = g.fw;
  const std::int64_t ch_max = ceil_div(g.fh, g.sh);
  const std::int64_t cw_max = ceil_div(g.fw, g.sw);
  ks.c = Tensor6<T>(Dims6{u(g.sh), u(g.sw), u(g.oc), u(ch_max), u(cw_max), u(g.ic)});
  const T* wd = w.data().data();
  T* cd = ks.c.data().data();

  for (std::int64_t y = 0; y < g.sh; ++y)
    for (std::int64_t x = 0; x < g.sw; ++x) {
      const std::int64_t oph = ks.extent_h(y) - 1;
      const std::int64_t opw = ks.extent_w(x) - 1;
      for (std::int64_t oc = 0; oc < g.oc; ++oc)
        for (std::int64_t ch = 0; ch <= oph; ++ch)
          for (std::int64_t cw = 0; cw <= opw; ++cw) {
            // Reversed slot order embeds the 180-degree rotation.
            const std::int64_t fh = y + (oph - ch) * g.sh;
            const std::int64_t fw = x + (opw - cw) * g.sw;
            if (fh < 0 || fh >= g.fh || fw < 0 || fw >= g.fw) continue;
            std::copy_n(wd + w.offset({u(oc), u(fh), u(fw), 0}), g.ic,
                        cd + ks.c.offset({u(y), u(x), u(oc), u(ch), u(cw), 0}));
          }
    }
  return ks;
}

namespace {

template <Scalar T>
void check_split(const KernelSplit<T>& ks, const ConvGeometry& g, const char* who) {
  const auto& d = ks.c.dims();
  const bool ok = ks.sh == g.sh && ks.sw == g.sw && ks.fh == g.fh && ks.fw == g.fw && d[0] == u(g.sh) &&
                  d[1] == u(g.sw) && d[2] == u(g.oc) && d[3] == u(ceil_div(g.fh, g.sh)) &&
                  d[4] == u(ceil_div(g.fw, g.sw)) && d[5] == u(g.ic);
  if (!ok) {
    throw ShapeError(std::string(who) + ": kernel split " + ks.c.dims_string() + " does not match geometry [" +
                     g.to_string() + "]");
  }
}

// First non-negative input coordinate of residue class `r` (i.e. r - pad
// raised by whole strides).
std::int64_t class_start(std::int64_t r, std::int64_t pad, std::int64_t stride) {
  std::int64_t start = r - pad;
  if (start < 0) start += ceil_div(-start, stride) * stride;
  return start;
}

// Shared loop nest of both kernel-split variants. With Trim = false every
// slot of the smaller kernel is executed and out-of-range dY positions are
// read from a zero row; with Trim = true the slot range is clipped to dY.
template <bool Trim, Scalar T>
OpResult<T> ks_deconv_impl(const Tensor4<T>& dy, const KernelSplit<T>& ks, const ConvGeometry& g,
                           const char* name) {
  require_dims(dy.dims(), g.output_dims(), name);
  check_split(ks, g, name);
  Tensor4<T> dx(g.input_dims());
  const T* dyd = dy.data().data();
  const T* cd = ks.c.data().data();
  T* dxd = dx.data().data();
  const std::vector<T> zeros(u(g.oc), T(0));
  const std::int64_t rows = ceil_div(g.ih, g.sh);
  const std::int64_t cols = ceil_div(g.iw, g.sw);
  std::uint64_t macs = 0;

  for (std::int64_t y = 0; y < g.sh; ++y)
    for (std::int64_t x = 0; x < g.sw; ++x) {
      const std::int64_t kh = ks.extent_h(y);
      const std::int64_t kw = ks.extent_w(x);
      if (kh == 0 || kw == 0) continue;  // no filter tap reaches this class
      const std::int64_t ih0 = class_start(y, g.ph, g.sh);
      const std::int64_t iw0 = class_start(x, g.pw, g.sw);
      const std::int64_t cells = g.n * rows;

#pragma omp parallel reduction(+ : macs)
      {
        std::vector<T> acc(u(g.ic));
#pragma omp for schedule(static)
        for (std::int64_t cell = 0; cell < cells; ++cell) {
          const std::int64_t n = cell / rows;
          const std::int64_t ih = (cell % rows) * g.sh + ih0;
          if (ih >= g.ih) continue;
          // Exact division: ih + ph - y is a multiple of sh.
          const std::int64_t oh_s = (ih + g.ph - y) / g.sh - (kh - 1);
          std::int64_t ch_s = 0;
          std::int64_t ch_e = kh;
          if constexpr (Trim) {
            ch_s = std::max<std::int64_t>(-oh_s, 0);
            ch_e = std::min(g.oh - oh_s, kh);
          }
          for (std::int64_t v = 0; v < cols; ++v) {
            const std::int64_t iw = v * g.sw + iw0;
            if (iw >= g.iw) continue;
            const std::int64_t ow_s = (iw + g.pw - x) / g.sw - (kw - 1);
            std::int64_t cw_s = 0;
            std::int64_t cw_e = kw;
            if constexpr (Trim) {
              cw_s = std::max<std::int64_t>(-ow_s, 0);
              cw_e = std::min(g.ow - ow_s, kw);
            }
            std::fill(acc.begin(), acc.end(), T(0));
            if (ch_e > ch_s && cw_e > cw_s) {
              macs += u((ch_e - ch_s) * (cw_e - cw_s) * g.oc * g.ic);
              for (std::int64_t ch = ch_s; ch < ch_e; ++ch) {
                const std::int64_t oh = oh_s + ch;
                for (std::int64_t cw = cw_s; cw < cw_e; ++cw) {
                  const std::int64_t ow = ow_s + cw;
                  const T* grad;
                  if constexpr (Trim) {
                    grad = dyd + dy.offset({u(n), u(oh), u(ow), 0});
                  } else {
                    const bool inside = oh >= 0 && oh < g.oh && ow >= 0 && ow < g.ow;
                    grad = inside ? dyd + dy.offset({u(n), u(oh), u(ow), 0}) : zeros.data();
                  }
                  for (std::int64_t oc = 0; oc < g.oc; ++oc) {
                    const T d = grad[oc];
                    const T* cp = cd + ks.c.offset({u(y), u(x), u(oc), u(ch), u(cw), 0});
                    for (std::int64_t ic = 0; ic < g.ic; ++ic) acc[u(ic)] += d * cp[ic];
                  }
                }
              }
            }
            std::copy(acc.begin(), acc.end(), dxd + dx.offset({u(n), u(ih), u(iw), 0}));
          }
        }
      }
    }
  const auto total = oracle_macs(g, OpKind::deconv);
  return {std::move(dx), OpStats{macs, total - macs}, name};
}

}  // namespace

template <Scalar T>
OpResult<T> ks_deconv(const Tensor4<T>& dy, const KernelSplit<T>& ks, const ConvGeometry& g) {
  return ks_deconv_impl<false>(dy, ks, g, "ks_deconv");
}

template <Scalar T>
OpResult<T> ks_deconv_v2(const Tensor4<T>& dy, const KernelSplit<T>& ks, const ConvGeometry& g) {
  return ks_deconv_impl<true>(dy, ks, g, "ks_deconv_v2");
}

template <Scalar T>
OpResult<T> deconv_unit_stride(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g) {
  if (g.sh != 1 || g.sw != 1) throw ParameterError("deconv_unit_stride requires unit stride");
  require_dims(dy.dims(), g.output_dims(), "deconv_unit_stride output gradient");
  require_dims(w.dims(), g.filter_dims(), "deconv_unit_stride filters");
  Tensor4<T> dx(g.input_dims());
  const T* dyd = dy.data().data();
  const T* wd = w.data().data();
  T* dxd = dx.data().data();
  const std::int64_t cells = g.n * g.ih;
  std::uint64_t macs = 0;

#pragma omp parallel reduction(+ : macs)
  {
    std::vector<T> acc(u(g.ic));
#pragma omp for schedule(static)
    for (std::int64_t cell = 0; cell < cells; ++cell) {
      const std::int64_t n = cell / g.ih;
      const std::int64_t ih = cell % g.ih;
      // oh + fh = ih + ph with fh in [0, F_H).
      const std::int64_t oh_s = std::max<std::int64_t>(ih + g.ph - g.fh + 1, 0);
      const std::int64_t oh_e = std::min(g.oh, ih + g.ph + 1);
      for (std::int64_t iw = 0; iw < g.iw; ++iw) {
        const std::int64_t ow_s = std::max<std::int64_t>(iw + g.pw - g.fw + 1, 0);
        const std::int64_t ow_e = std::min(g.ow, iw + g.pw + 1);
        std::fill(acc.begin(), acc.end(), T(0));
        if (oh_e > oh_s && ow_e > ow_s) macs += u((oh_e - oh_s) * (ow_e - ow_s) * g.oc * g.ic);
        for (std::int64_t oh = oh_s; oh < oh_e; ++oh)
          for (std::int64_t ow = ow_s; ow < ow_e; ++ow) {
            const T* grad = dyd + dy.offset({u(n), u(oh), u(ow), 0});
            const std::int64_t fh = ih + g.ph - oh;
            const std::int64_t fw = iw + g.pw - ow;
            for (std::int64_t oc = 0; oc < g.oc; ++oc) {
              const T d = grad[oc];
              const T* wp = wd + w.offset({u(oc), u(fh), u(fw), 0});
              for (std::int64_t ic = 0; ic < g.ic; ++ic) acc[u(ic)] += d * wp[ic];
            }
          }
        std::copy(acc.begin(), acc.end(), dxd + dx.offset({u(n), u(ih), u(iw), 0}));
      }
    }
  }
  const auto total = oracle_macs(g, OpKind::deconv);
  return {std::move(dx), OpStats{macs, total - macs}, "deconv_unit_stride"};
}

#define CKS_INSTANTIATE_DECONV(T)                                                                     \
  template KernelSplit<T> ks_split(const Tensor4<T>&, const ConvGeometry&);                          \
  template OpResult<T> ks_deconv(const Tensor4<T>&, const KernelSplit<T>&, const ConvGeometry&);     \
  template OpResult<T> ks_deconv_v2(const Tensor4<T>&, const KernelSplit<T>&, const ConvGeometry&);  \
  template OpResult<T> deconv_unit_stride(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);

CKS_INSTANTIATE_DECONV(float)
CKS_INSTANTIATE_DECONV(double)

#undef CKS_INSTANTIATE_DECONV

}  // namespace cks
