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
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "cks/tensor.hpp"

namespace cks {

// Binary blob layout, all little-endian:
//   "CKS1" | rank:u64 | extents:u64[rank] | scalars:T[product(extents)]
// The scalar width is not stored; readers name it and the payload length
// must match exactly.
inline constexpr std::array<char, 4> kBlobMagic{'C', 'K', 'S', '1'};

template <Scalar T, std::size_t Rank>
std::vector<std::byte> to_blob(const Tensor<T, Rank>& t);

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> from_blob(std::span<const std::byte> blob);

template <Scalar T, std::size_t Rank>
void write_blob(const std::filesystem::path& path, const Tensor<T, Rank>& t);

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> read_blob(const std::filesystem::path& path);

// {"dims": [...], "data": [...]}
template <Scalar T, std::size_t Rank>
nlohmann::json to_json(const Tensor<T, Rank>& t);

template <Scalar T, std::size_t Rank>
Tensor<T, Rank> tensor_from_json(const nlohmann::json& j);

}  // namespace cks
