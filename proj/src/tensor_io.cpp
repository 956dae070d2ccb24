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

#include "cks/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace cks {
namespace {

template <typename U>
void put_le(std::vector<std::byte>& out, U value) {
  std::array<std::byte, sizeof(U)> raw;
  std::memcpy(raw.data(), &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

template <typename U>
U get_le(std::span<const std::byte> in, std::size_t& pos) {
  if (pos + sizeof(U) > in.size()) throw IoError("tensor blob truncated");
  std::array<std::byte, sizeof(U)> raw;
  std::memcpy(raw.data(), in.data() + pos, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  pos += sizeof(U);
  U value;
  std::memcpy(&value, raw.data(), sizeof(U));
  return value;
}

}  // namespace

template <Scalar T, std::size_t Rank>
std::vector<std::byte> to_blob(const Tensor<T, Rank>& t) {
  std::vector<std::byte> out;
  out.reserve(4 + 8 * (Rank + 1) + sizeof(T) * t.size());
  for (char c : kBlobMagic) out.push_back(static_cast<std::byte>(c));
  put_le<std::uint64_t>(out, Rank);
  for (std::size_t d : t.dims()) put_le<std::uint64_t>(out, d);
  for (T v : t.data()) put_le<T>(out, v);
  return out;
}

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> from_blob(std::span<const std::byte> blob) {
  if (blob.size() < 4 || std::memcmp(blob.data(), kBlobMagic.data(), 4) != 0) {
    throw IoError("tensor blob: bad magic");
  }
  std::size_t pos = 4;
  const auto rank = get_le<std::uint64_t>(blob, pos);
  if (rank != Rank) {
    throw IoError("tensor blob: rank " + std::to_string(rank) + ", expected " + std::to_string(Rank));
  }
  typename Tensor<T, Rank>::Dims dims{};
  for (auto& d : dims) d = static_cast<std::size_t>(get_le<std::uint64_t>(blob, pos));
  const std::size_t n = Tensor<T, Rank>::count(dims);
  if (blob.size() - pos != n * sizeof(T)) {
    throw IoError("tensor blob: payload is " + std::to_string(blob.size() - pos) + " bytes, expected " +
                  std::to_string(n * sizeof(T)));
  }
  std::vector<T> data(n);
  for (auto& v : data) v = get_le<T>(blob, pos);
  return Tensor<T, Rank>(dims, std::move(data));
}

template <Scalar T, std::size_t Rank>
void write_blob(const std::filesystem::path& path, const Tensor<T, Rank>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const auto blob = to_blob(t);
  os.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> read_blob(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_blob<T, Rank>(std::as_bytes(std::span(raw)));
}

template <Scalar T, std::size_t Rank>
nlohmann::json to_json(const Tensor<T, Rank>& t) {
  return nlohmann::json{{"dims", t.dims()}, {"data", t.values()}};
}

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> tensor_from_json(const nlohmann::json& j) {
  const auto dims_vec = j.at("dims").get<std::vector<std::size_t>>();
  if (dims_vec.size() != Rank) throw ShapeError("tensor json: wrong rank");
  typename Tensor<T, Rank>::Dims dims{};
  std::copy(dims_vec.begin(), dims_vec.end(), dims.begin());
  return Tensor<T, Rank>(dims, j.at("data").get<std::vector<T>>());
}

#define CKS_INSTANTIATE_IO(T, R)                                                      \
  template std::vector<std::byte> to_blob(const Tensor<T, R>&);                       \
  template Tensor<T, R> from_blob<T, R>(std::span<const std::byte>);                  \
  template void write_blob(const std::filesystem::path&, const Tensor<T, R>&);        \
  template Tensor<T, R> read_blob<T, R>(const std::filesystem::path&);                \
  template nlohmann::json to_json(const Tensor<T, R>&);                               \
  template Tensor<T, R> tensor_from_json<T, R>(const nlohmann::json&);

CKS_INSTANTIATE_IO(float, 4)
CKS_INSTANTIATE_IO(double, 4)
CKS_INSTANTIATE_IO(float, 6)
CKS_INSTANTIATE_IO(double, 6)

#undef CKS_INSTANTIATE_IO

}  // namespace cks
