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

// Serial reference operators against the OpenMP kernels and the GEMM path.

#include <benchmark/benchmark.h>

#include <random>

#include "cks/gemm.hpp"
#include "cks/ops.hpp"
#include "cks/reference.hpp"
#include "cks/verify.hpp"

namespace {

cks::ConvGeometry layer(std::int64_t size, std::int64_t channels) {
  return cks::infer({.n = 2, .ih = size, .iw = size, .ic = channels, .oc = channels, .fh = 3, .fw = 3, .sh = 2,
                     .sw = 2, .ph = 1, .pw = 1});
}

struct Operands {
  explicit Operands(const cks::ConvGeometry& geometry) : g(geometry) {
    std::mt19937_64 rng(7);
    x = cks::random_tensor<float>(g.input_dims(), rng);
    w = cks::random_tensor<float>(g.filter_dims(), rng);
    dy = cks::random_tensor<float>(g.output_dims(), rng);
  }
  cks::ConvGeometry g;
  cks::Tensor4<float> x, w, dy;
};

template <typename Fn>
void run(benchmark::State& state, Fn fn) {
  const Operands ops(layer(state.range(0), state.range(1)));
  for (auto _ : state) {
    auto r = fn(ops);
    benchmark::DoNotOptimize(r.value.data().data());
  }
}

void BM_conv_naive(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::reference::naive_conv2d(o.x, o.w, o.g); });
}
void BM_conv_v2(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::conv_v2(o.x, o.w, o.g); });
}
void BM_conv_gemm(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::gemm_conv2d(o.x, o.w, o.g); });
}
void BM_deconv_naive(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::reference::naive_deconv2d(o.dy, o.w, o.g); });
}
void BM_deconv_ks_v2(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::ks_deconv_v2(o.dy, cks::ks_split(o.w, o.g), o.g); });
}
void BM_dilated_naive(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::reference::naive_dilated_conv2d(o.x, o.dy, o.g); });
}
void BM_dilated_sk_v2(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::sk_dilated_v2(o.x, o.dy, o.g); });
}
void BM_dilated_partitioned(benchmark::State& s) {
  run(s, [](const Operands& o) { return cks::partitioned_dilated(o.x, o.dy, o.g, 4); });
}

#define CKS_SHAPES ->Args({32, 16})->Args({16, 64})->Unit(benchmark::kMillisecond)

BENCHMARK(BM_conv_naive) CKS_SHAPES;
BENCHMARK(BM_conv_v2) CKS_SHAPES;
BENCHMARK(BM_conv_gemm) CKS_SHAPES;
BENCHMARK(BM_deconv_naive) CKS_SHAPES;
BENCHMARK(BM_deconv_ks_v2) CKS_SHAPES;
BENCHMARK(BM_dilated_naive) CKS_SHAPES;
BENCHMARK(BM_dilated_sk_v2) CKS_SHAPES;
BENCHMARK(BM_dilated_partitioned) CKS_SHAPES;

}  // namespace

BENCHMARK_MAIN();
