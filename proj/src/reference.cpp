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

#include "cks/reference.hpp"

namespace cks::reference {
namespace {

// Plain strided convolution of an already padded input. Every term is
// executed and counted.
template <Scalar T>
Tensor4<T> dense_conv(const Tensor4<T>& xp, const Tensor4<T>& filt, std::size_t sh, std::size_t sw,
                      std::size_t out_h, std::size_t out_w, std::uint64_t& macs) {
  const auto [n_n, hp, wp, c_n] = xp.dims();
  const auto [k_n, fh_n, fw_n, fc] = filt.dims();
  Tensor4<T> y(Dims4{n_n, out_h, out_w, k_n});
  auto xd = xp.data();
  auto fd = filt.data();
  auto yd = y.data();
  for (std::size_t n = 0; n < n_n; ++n)
    for (std::size_t oh = 0; oh < out_h; ++oh)
      for (std::size_t ow = 0; ow < out_w; ++ow)
        for (std::size_t k = 0; k < k_n; ++k) {
          T acc = 0;
          for (std::size_t fh = 0; fh < fh_n; ++fh)
            for (std::size_t fw = 0; fw < fw_n; ++fw)
              for (std::size_t c = 0; c < c_n; ++c) {
                acc += xd[xp.offset({n, oh * sh + fh, ow * sw + fw, c})] * fd[filt.offset({k, fh, fw, c})];
                ++macs;
              }
          yd[y.offset({n, oh, ow, k})] = acc;
        }
  return y;
}

std::size_t u(std::int64_t v) { return static_cast<std::size_t>(v); }

}  // namespace

template <Scalar T>
OpResult<T> naive_conv2d(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(x.dims(), g.input_dims(), "naive_conv2d input");
  require_dims(w.dims(), g.filter_dims(), "naive_conv2d filters");
  std::uint64_t macs = 0;
  auto y = dense_conv(zero_pad_hw(x, u(g.ph), u(g.pw)), w, u(g.sh), u(g.sw), u(g.oh), u(g.ow), macs);
  return {std::move(y), OpStats{macs, 0}, "naive_conv2d"};
}

template <Scalar T>
OpResult<T> naive_deconv2d(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(dy.dims(), g.output_dims(), "naive_deconv2d output gradient");
  require_dims(w.dims(), g.filter_dims(), "naive_deconv2d filters");

  // Input rows/cols past the last window get no gradient; extend the far
  // border so the unit-stride output still spans the whole input.
  const std::int64_t rem_h = (g.ih + 2 * g.ph - g.fh) % g.sh;
  const std::int64_t rem_w = (g.iw + 2 * g.pw - g.fw) % g.sw;
  const std::size_t top = u(g.fh - 1 - g.ph);
  const std::size_t left = u(g.fw - 1 - g.pw);
  const auto padded = zero_pad_hw(zero_insert_hw(dy, u(g.sh), u(g.sw)), top, left, top + u(rem_h), left + u(rem_w));

  // (O_C,F_H,F_W,I_C) rotated, then viewed as I_C filters over O_C channels.
  const auto rotated = rot180(w);
  Tensor4<T> flipped(Dims4{u(g.ic), u(g.fh), u(g.fw), u(g.oc)});
  for (std::size_t oc = 0; oc < u(g.oc); ++oc)
    for (std::size_t fh = 0; fh < u(g.fh); ++fh)
      for (std::size_t fw = 0; fw < u(g.fw); ++fw)
        for (std::size_t ic = 0; ic < u(g.ic); ++ic)
          flipped.data()[flipped.offset({ic, fh, fw, oc})] = rotated.data()[rotated.offset({oc, fh, fw, ic})];

  std::uint64_t macs = 0;
  auto dx = dense_conv(padded, flipped, 1, 1, u(g.ih), u(g.iw), macs);
  return {std::move(dx), OpStats{macs, 0}, "naive_deconv2d"};
}

template <Scalar T>
Tensor4<T> scatter_deconv2d(const Tensor4<T>& dy, const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(dy.dims(), g.output_dims(), "scatter_deconv2d output gradient");
  require_dims(w.dims(), g.filter_dims(), "scatter_deconv2d filters");
  Tensor4<T> dx(g.input_dims());
  auto dyd = dy.data();
  auto wd = w.data();
  auto dxd = dx.data();
  for (std::int64_t n = 0; n < g.n; ++n)
    for (std::int64_t oh = 0; oh < g.oh; ++oh)
      for (std::int64_t ow = 0; ow < g.ow; ++ow)
        for (std::int64_t fh = 0; fh < g.fh; ++fh)
          for (std::int64_t fw = 0; fw < g.fw; ++fw) {
            const std::int64_t ih = oh * g.sh + fh - g.ph;
            const std::int64_t iw = ow * g.sw + fw - g.pw;
            if (ih < 0 || ih >= g.ih || iw < 0 || iw >= g.iw) continue;
            for (std::int64_t oc = 0; oc < g.oc; ++oc) {
              const T grad = dyd[dy.offset({u(n), u(oh), u(ow), u(oc)})];
              for (std::int64_t ic = 0; ic < g.ic; ++ic) {
                dxd[dx.offset({u(n), u(ih), u(iw), u(ic)})] += grad * wd[w.offset({u(oc), u(fh), u(fw), u(ic)})];
              }
            }
          }
  return dx;
}

template <Scalar T>
OpResult<T> naive_dilated_conv2d(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g) {
  require_dims(x.dims(), g.input_dims(), "naive_dilated_conv2d input");
  require_dims(dy.dims(), g.output_dims(), "naive_dilated_conv2d output gradient");
  const auto xp = zero_pad_hw(x, u(g.ph), u(g.pw));
  const auto filt = zero_insert_hw(dy, u(g.sh), u(g.sw));
  const std::size_t kh = u(g.oh_inserted());
  const std::size_t kw = u(g.ow_inserted());

  Tensor4<T> dw(g.filter_dims());
  auto xd = xp.data();
  auto fd = filt.data();
  auto dwd = dw.data();
  std::uint64_t macs = 0;
  for (std::size_t oc = 0; oc < u(g.oc); ++oc)
    for (std::size_t fh = 0; fh < u(g.fh); ++fh)
      for (std::size_t fw = 0; fw < u(g.fw); ++fw)
        for (std::size_t ic = 0; ic < u(g.ic); ++ic) {
          T acc = 0;
          for (std::size_t n = 0; n < u(g.n); ++n)
            for (std::size_t a = 0; a < kh; ++a)
              for (std::size_t b = 0; b < kw; ++b) {
                acc += xd[xp.offset({n, fh + a, fw + b, ic})] * fd[filt.offset({n, a, b, oc})];
                ++macs;
              }
          dwd[dw.offset({oc, fh, fw, ic})] = acc;
        }
  return {std::move(dw), OpStats{macs, 0}, "naive_dilated_conv2d"};
}

#define CKS_INSTANTIATE_REFERENCE(T)                                                                  \
  template OpResult<T> naive_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);      \
  template OpResult<T> naive_deconv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);    \
  template Tensor4<T> scatter_deconv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);   \
  template OpResult<T> naive_dilated_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);

CKS_INSTANTIATE_REFERENCE(float)
CKS_INSTANTIATE_REFERENCE(double)

#undef CKS_INSTANTIATE_REFERENCE

}  // namespace cks::reference
