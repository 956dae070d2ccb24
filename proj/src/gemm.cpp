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

#include "cks/gemm.hpp"

#include <algorithm>
#include <string>

#include "cks/errors.hpp"
#include "kernel_util.hpp"

namespace cks {

using detail::u;

template <Scalar T>
PatchMatrix<T> im2col(const Tensor4<T>& x, const ConvGeometry& g) {
  require_dims(x.dims(), g.input_dims(), "im2col input");
  PatchMatrix<T> p(u(g.n * g.oh * g.ow), u(g.fh * g.fw * g.ic));
  const T* xd = x.data().data();
  for (std::int64_t n = 0; n < g.n; ++n)
    for (std::int64_t oh = 0; oh < g.oh; ++oh)
      for (std::int64_t ow = 0; ow < g.ow; ++ow) {
        T* row = p.data.data() + u((n * g.oh + oh) * g.ow + ow) * p.cols;
        for (std::int64_t fh = 0; fh < g.fh; ++fh) {
          const std::int64_t ih = oh * g.sh + fh - g.ph;
          if (ih < 0 || ih >= g.ih) continue;
          for (std::int64_t fw = 0; fw < g.fw; ++fw) {
            const std::int64_t iw = ow * g.sw + fw - g.pw;
            if (iw < 0 || iw >= g.iw) continue;
            std::copy_n(xd + x.offset({u(n), u(ih), u(iw), 0}), g.ic, row + u((fh * g.fw + fw) * g.ic));
          }
        }
      }
  return p;
}

template <Scalar T>
void gemm(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c, std::size_t block) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols) throw ShapeError("gemm: incompatible matrices");
  if (block == 0) throw ParameterError("gemm: block must be positive");
  const std::int64_t m = static_cast<std::int64_t>(a.rows);
  const std::size_t k = a.cols;
  const std::size_t n = b.cols;
  const std::int64_t bs = static_cast<std::int64_t>(block);

#pragma omp parallel for schedule(static)
  for (std::int64_t i0 = 0; i0 < m; i0 += bs) {
    const std::size_t i1 = u(std::min(i0 + bs, m));
    for (std::size_t k0 = 0; k0 < k; k0 += block) {
      const std::size_t k1 = std::min(k0 + block, k);
      for (std::size_t j0 = 0; j0 < n; j0 += block) {
        const std::size_t j1 = std::min(j0 + block, n);
        for (std::size_t i = u(i0); i < i1; ++i)
          for (std::size_t kk = k0; kk < k1; ++kk) {
            const T av = a.data[i * k + kk];
            const T* brow = b.data.data() + kk * n;
            T* crow = c.data.data() + i * n;
            for (std::size_t j = j0; j < j1; ++j) crow[j] += av * brow[j];
          }
      }
    }
  }
}

template <Scalar T>
OpResult<T> gemm_conv2d(const Tensor4<T>& x, const Tensor4<T>& w, const ConvGeometry& g) {
  require_dims(w.dims(), g.filter_dims(), "gemm_conv2d filters");
  const auto patches = im2col(x, g);
  // (O_C, K) -> (K, O_C)
  const std::size_t kdim = u(g.fh * g.fw * g.ic);
  Matrix<T> wmat(kdim, u(g.oc));
  const T* wd = w.data().data();
  for (std::size_t oc = 0; oc < u(g.oc); ++oc)
    for (std::size_t kk = 0; kk < kdim; ++kk) wmat(kk, oc) = wd[oc * kdim + kk];
  Matrix<T> out(patches.rows, u(g.oc));
  gemm(patches, wmat, out);
  return {Tensor4<T>(g.output_dims(), std::move(out.data)), OpStats{oracle_macs(g, OpKind::conv), 0},
          "gemm_conv2d"};
}

template <Scalar T>
OpResult<T> partitioned_dilated(const Tensor4<T>& x, const Tensor4<T>& dy, const ConvGeometry& g, std::int64_t gz,
                                Reduction reduction) {
  require_dims(x.dims(), g.input_dims(), "partitioned_dilated input");
  require_dims(dy.dims(), g.output_dims(), "partitioned_dilated output gradient");
  const std::int64_t gk = g.n * g.oh * g.ow;
  if (gz < 1 || gz > gk) {
    throw ParameterError("partitioned_dilated: gz=" + std::to_string(gz) + " outside [1, " + std::to_string(gk) + "]");
  }
  const std::size_t wsize = u(g.oc * g.fh * g.fw * g.ic);
  std::vector<std::vector<T>> partials(u(gz));
  const T* xd = x.data().data();
  const T* dyd = dy.data().data();
  std::uint64_t macs = 0;

#pragma omp parallel for schedule(dynamic, 1) reduction(+ : macs)
  for (std::int64_t seg = 0; seg < gz; ++seg) {
    std::vector<T> part(wsize, T(0));
    const std::int64_t k_begin = seg * gk / gz;
    const std::int64_t k_end = (seg + 1) * gk / gz;
    for (std::int64_t k = k_begin; k < k_end; ++k) {
      const std::int64_t n = k / (g.oh * g.ow);
      const std::int64_t oh = k / g.ow % g.oh;
      const std::int64_t ow = k % g.ow;
      const T* grad = dyd + dy.offset({u(n), u(oh), u(ow), 0});
      for (std::int64_t fh = 0; fh < g.fh; ++fh) {
        const std::int64_t ih = oh * g.sh + fh - g.ph;
        if (ih < 0 || ih >= g.ih) continue;
        for (std::int64_t fw = 0; fw < g.fw; ++fw) {
          const std::int64_t iw = ow * g.sw + fw - g.pw;
          if (iw < 0 || iw >= g.iw) continue;
          const T* xp = xd + x.offset({u(n), u(ih), u(iw), 0});
          macs += u(g.oc * g.ic);
          for (std::int64_t oc = 0; oc < g.oc; ++oc) {
            const T d = grad[oc];
            T* pp = part.data() + u(((oc * g.fh + fh) * g.fw + fw) * g.ic);
            for (std::int64_t ic = 0; ic < g.ic; ++ic) pp[ic] += xp[ic] * d;
          }
        }
      }
    }
    partials[u(seg)] = std::move(part);
  }

  Tensor4<T> dw(g.filter_dims());
  auto out = dw.data();
  if (reduction == Reduction::serial) {
    for (const auto& part : partials)
      for (std::size_t i = 0; i < wsize; ++i) out[i] += part[i];
  } else {
    for (std::size_t stride = 1; stride < partials.size(); stride *= 2) {
#pragma omp parallel for schedule(static)
      for (std::int64_t lo = 0; lo < static_cast<std::int64_t>(partials.size() - stride);
           lo += static_cast<std::int64_t>(2 * stride)) {
        auto& dst = partials[u(lo)];
        const auto& src = partials[u(lo) + stride];
        for (std::size_t i = 0; i < wsize; ++i) dst[i] += src[i];
      }
    }
    std::copy(partials.front().begin(), partials.front().end(), out.begin());
  }
  return {std::move(dw), OpStats{macs, oracle_macs(g, OpKind::dilated) - macs}, "partitioned_dilated"};
}

#define CKS_INSTANTIATE_GEMM(T)                                                                          \
  template PatchMatrix<T> im2col(const Tensor4<T>&, const ConvGeometry&);                               \
  template void gemm(const Matrix<T>&, const Matrix<T>&, Matrix<T>&, std::size_t);                      \
  template OpResult<T> gemm_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);          \
  template OpResult<T> partitioned_dilated(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&,   \
                                           std::int64_t, Reduction);

CKS_INSTANTIATE_GEMM(float)
CKS_INSTANTIATE_GEMM(double)

#undef CKS_INSTANTIATE_GEMM

}  // namespace cks
