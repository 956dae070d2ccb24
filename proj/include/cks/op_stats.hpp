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

#include <cstdint>
#include <string_view>

#include <json.hpp>

#include "cks/tensor.hpp"

namespace cks {

// macs + zeros_skipped equals the MAC count of the matching reference operator.
struct OpStats {
  std::uint64_t macs = 0;
  std::uint64_t zeros_skipped = 0;

  friend bool operator==(const OpStats&, const OpStats&) = default;
};

inline void to_json(nlohmann::json& j, const OpStats& s) {
  j = nlohmann::json{{"macs", s.macs}, {"zeros_skipped", s.zeros_skipped}};
}

template <Scalar T>
struct OpResult {
  Tensor4<T> value;
  OpStats stats;
  std::string_view algorithm;
};

}  // namespace cks
