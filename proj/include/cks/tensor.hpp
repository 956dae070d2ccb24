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

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cks/errors.hpp"

namespace cks {

template <typename T>
concept Scalar = std::same_as<T, float> || std::same_as<T, double>;

/// Dense row-major tensor with the last dimension fastest.
///
/// Element access through at()/set() is bounds-checked and throws IndexError;
/// kernels read through data() with offsets computed from dims().
template <Scalar T, std::size_t Rank>
class Tensor {
 public:
  using value_type = T;
  using Dims = std::array<std::size_t, Rank>;
  static constexpr std::size_t rank = Rank;

  Tensor() { dims_.fill(0); }

  explicit Tensor(const Dims& dims) : dims_(dims), data_(count(dims), T(0)) {}

  Tensor(const Dims& dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != count(dims_)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match dims " + dims_string());
    }
  }

  static std::size_t count(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t axis) const noexcept { return dims_[axis]; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  // Unchecked flat offset.
  std::size_t offset(const Dims& idx) const noexcept {
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) off = off * dims_[a] + idx[a];
    return off;
  }

  T at(const Dims& idx) const { return data_[checked_offset(idx)]; }
  void set(const Dims& idx, T value) { data_[checked_offset(idx)] = value; }

  template <std::integral... I>
    requires(sizeof...(I) == Rank)
  T at(I... idx) const {
    return at(Dims{static_cast<std::size_t>(idx)...});
  }

  // Inverse of offset(); flat must be below size().
  Dims unflatten(std::size_t flat) const noexcept {
    Dims idx{};
    for (std::size_t a = Rank; a-- > 0;) {
      idx[a] = flat % dims_[a];
      flat /= dims_[a];
    }
    return idx;
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  std::string dims_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t a = 0; a < Rank; ++a) os << (a ? "," : "") << dims_[a];
    os << ')';
    return os.str();
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t checked_offset(const Dims& idx) const {
    for (std::size_t a = 0; a < Rank; ++a) {
      if (idx[a] >= dims_[a]) {
        throw IndexError("index " + std::to_string(idx[a]) + " on axis " + std::to_string(a) +
                         " out of range for dims " + dims_string());
      }
    }
    return offset(idx);
  }

  Dims dims_;
  std::vector<T> data_;
};

template <Scalar T>
using Tensor4 = Tensor<T, 4>;
template <Scalar T>
using Tensor6 = Tensor<T, 6>;

using Dims4 = std::array<std::size_t, 4>;
using Dims6 = std::array<std::size_t, 6>;

template <Scalar To, Scalar From, std::size_t Rank>
Tensor<To, Rank> cast(const Tensor<From, Rank>& t) {
  std::vector<To> out(t.size());
  std::transform(t.data().begin(), t.data().end(), out.begin(),
                 [](From v) { return static_cast<To>(v); });
  return Tensor<To, Rank>(t.dims(), std::move(out));
}

// Filters (O_C,F_H,F_W,I_C) rotated by 180 degrees in the spatial plane.
template <Scalar T>
Tensor4<T> rot180(const Tensor4<T>& w) {
  const auto [oc_n, fh_n, fw_n, ic_n] = w.dims();
  Tensor4<T> out(w.dims());
  auto src = w.data();
  auto dst = out.data();
  for (std::size_t oc = 0; oc < oc_n; ++oc)
    for (std::size_t fh = 0; fh < fh_n; ++fh)
      for (std::size_t fw = 0; fw < fw_n; ++fw) {
        const std::size_t from = w.offset({oc, fh_n - 1 - fh, fw_n - 1 - fw, 0});
        const std::size_t to = out.offset({oc, fh, fw, 0});
        std::copy_n(src.begin() + from, ic_n, dst.begin() + to);
      }
  return out;
}

// (O_C,F_H,F_W,I_C) -> (F_H,F_W,I_C,O_C).
template <Scalar T>
Tensor4<T> transpose_filters(const Tensor4<T>& w) {
  const auto [oc_n, fh_n, fw_n, ic_n] = w.dims();
  Tensor4<T> out(Dims4{fh_n, fw_n, ic_n, oc_n});
  auto src = w.data();
  auto dst = out.data();
  std::size_t flat = 0;
  for (std::size_t oc = 0; oc < oc_n; ++oc)
    for (std::size_t fh = 0; fh < fh_n; ++fh)
      for (std::size_t fw = 0; fw < fw_n; ++fw)
        for (std::size_t ic = 0; ic < ic_n; ++ic) dst[out.offset({fh, fw, ic, oc})] = src[flat++];
  return out;
}

// (F_H,F_W,I_C,O_C) -> (O_C,F_H,F_W,I_C); inverse of transpose_filters.
template <Scalar T>
Tensor4<T> untranspose_filters(const Tensor4<T>& wt) {
  const auto [fh_n, fw_n, ic_n, oc_n] = wt.dims();
  Tensor4<T> out(Dims4{oc_n, fh_n, fw_n, ic_n});
  auto src = wt.data();
  auto dst = out.data();
  std::size_t flat = 0;
  for (std::size_t fh = 0; fh < fh_n; ++fh)
    for (std::size_t fw = 0; fw < fw_n; ++fw)
      for (std::size_t ic = 0; ic < ic_n; ++ic)
        for (std::size_t oc = 0; oc < oc_n; ++oc) dst[out.offset({oc, fh, fw, ic})] = src[flat++];
  return out;
}

// Explicit zero border on the spatial axes of an (N,H,W,C) tensor. The
// bottom/right borders may be wider than top/left.
template <Scalar T>
Tensor4<T> zero_pad_hw(const Tensor4<T>& x, std::size_t top, std::size_t left, std::size_t bottom,
                       std::size_t right) {
  const auto [n_n, h_n, w_n, c_n] = x.dims();
  Tensor4<T> out(Dims4{n_n, h_n + top + bottom, w_n + left + right, c_n});
  auto src = x.data();
  auto dst = out.data();
  for (std::size_t n = 0; n < n_n; ++n)
    for (std::size_t h = 0; h < h_n; ++h) {
      const std::size_t from = x.offset({n, h, 0, 0});
      const std::size_t to = out.offset({n, h + top, left, 0});
      std::copy_n(src.begin() + from, w_n * c_n, dst.begin() + to);
    }
  return out;
}

template <Scalar T>
Tensor4<T> zero_pad_hw(const Tensor4<T>& x, std::size_t ph, std::size_t pw) {
  return zero_pad_hw(x, ph, pw, ph, pw);
}

// Inserts (stride - 1) zeros between neighbouring spatial elements.
template <Scalar T>
Tensor4<T> zero_insert_hw(const Tensor4<T>& y, std::size_t sh, std::size_t sw) {
  if (sh == 0 || sw == 0) throw ParameterError("zero_insert_hw: strides must be >= 1");
  const auto [n_n, h_n, w_n, c_n] = y.dims();
  const std::size_t hp = h_n == 0 ? 0 : h_n + (h_n - 1) * (sh - 1);
  const std::size_t wp = w_n == 0 ? 0 : w_n + (w_n - 1) * (sw - 1);
  Tensor4<T> out(Dims4{n_n, hp, wp, c_n});
  auto src = y.data();
  auto dst = out.data();
  for (std::size_t n = 0; n < n_n; ++n)
    for (std::size_t h = 0; h < h_n; ++h)
      for (std::size_t w = 0; w < w_n; ++w) {
        const std::size_t from = y.offset({n, h, w, 0});
        const std::size_t to = out.offset({n, h * sh, w * sw, 0});
        std::copy_n(src.begin() + from, c_n, dst.begin() + to);
      }
  return out;
}

}  // namespace cks
