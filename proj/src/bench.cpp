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

#include "cks/bench.hpp"

#include <chrono>
#include <functional>
#include <ostream>
#include <random>

#include "cks/errors.hpp"
#include "cks/gemm.hpp"
#include "cks/ops.hpp"
#include "cks/reference.hpp"
#include "cks/verify.hpp"

namespace cks {

const char* to_string(Dtype dtype) { return dtype == Dtype::f32 ? "f32" : "f64"; }

Dtype dtype_from_string(const std::string& s) {
  if (s == "f32") return Dtype::f32;
  if (s == "f64") return Dtype::f64;
  throw ParameterError("unknown dtype: " + s);
}

std::vector<ConvGeometry> suite_geometries(const std::string& suite) {
  std::int64_t f = 0;
  std::int64_t p = 0;
  if (suite == "paper-3x3") {
    f = 3;
    p = 1;
  } else if (suite == "paper-5x5") {
    f = 5;
    p = 2;
  } else {
    throw ParameterError("unknown suite: " + suite);
  }
  struct Scale {
    std::int64_t size, channels, batch;
  };
  static constexpr Scale kScales[] = {{64, 16, 1}, {48, 24, 1}, {32, 32, 2},  {24, 48, 2},
                                      {16, 64, 4}, {12, 96, 4}, {8, 128, 8}, {4, 192, 8}};
  std::vector<ConvGeometry> out;
  for (const auto& s : kScales) {
    out.push_back(infer({.n = s.batch, .ih = s.size, .iw = s.size, .ic = s.channels, .oc = s.channels, .fh = f,
                         .fw = f, .sh = 2, .sw = 2, .ph = p, .pw = p}));
  }
  return out;
}

namespace {

struct Candidate {
  const char* impl;
  const char* algorithm;
  std::function<OpStats(double& checksum)> run;
};

template <Scalar T>
double checksum(const Tensor4<T>& t) {
  double sum = 0;
  for (T v : t.data()) sum += static_cast<double>(v);
  return sum;
}

template <Scalar T>
std::vector<Candidate> candidates(OpKind op, const ConvGeometry& g, const Tensor4<T>& x, const Tensor4<T>& w,
                                  const Tensor4<T>& dy, bool deterministic) {
  auto wrap = [](auto fn) {
    return [fn](double& sum) {
      auto r = fn();
      sum = checksum(r.value);
      return r.stats;
    };
  };
  switch (op) {
    case OpKind::conv:
      return {{"naive", "naive_conv2d", wrap([&] { return reference::naive_conv2d(x, w, g); })},
              {"cks", "conv_v2", wrap([&] { return conv_v2(x, w, g); })},
              {"gemm", "gemm_conv2d", wrap([&] { return gemm_conv2d(x, w, g); })}};
    case OpKind::deconv:
      return {{"naive", "naive_deconv2d", wrap([&] { return reference::naive_deconv2d(dy, w, g); })},
              {"cks", "ks_deconv", wrap([&] { return ks_deconv(dy, ks_split(w, g), g); })},
              {"cks", "ks_deconv_v2", wrap([&] { return ks_deconv_v2(dy, ks_split(w, g), g); })}};
    case OpKind::dilated: {
      // A fixed upper bound keeps segment counts, and therefore sums,
      // independent of the thread count in deterministic mode.
      GzPolicy policy = deterministic ? GzPolicy{1, 16} : default_gz_policy();
      const auto blocks = work_blocks(g);
      const std::int64_t gz =
          std::min(select_gz(blocks.conv, blocks.deconv, blocks.dilated, policy), g.n * g.oh * g.ow);
      const Reduction reduction = deterministic ? Reduction::serial : Reduction::pairwise;
      return {{"naive", "naive_dilated_conv2d", wrap([&] { return reference::naive_dilated_conv2d(x, dy, g); })},
              {"cks", "sk_dilated", wrap([&] { return sk_dilated(x, dy, g); })},
              {"cks", "sk_dilated_v2", wrap([&] { return sk_dilated_v2(x, dy, g); })},
              {"gemm", "partitioned_dilated",
               wrap([&, gz, reduction] { return partitioned_dilated(x, dy, g, gz, reduction); })}};
    }
  }
  return {};
}

template <Scalar T>
void bench_case(const BenchConfig& config, int index, const ConvGeometry& g, std::vector<BenchRow>& rows) {
  std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(index));
  const auto x = random_tensor<T>(g.input_dims(), rng);
  const auto w = random_tensor<T>(g.filter_dims(), rng);
  const auto dy = random_tensor<T>(g.output_dims(), rng);
  for (OpKind op : config.ops) {
    for (const auto& cand : candidates<T>(op, g, x, w, dy, config.deterministic)) {
      double sum = 0;
      const OpStats stats = cand.run(sum);  // warm-up
      const double warm_sum = sum;
      const auto start = std::chrono::steady_clock::now();
      for (int r = 0; r < config.reps; ++r) cand.run(sum);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

      BenchRow row;
      row.case_index = index + 1;
      row.op = op;
      row.impl = cand.impl;
      row.algorithm = cand.algorithm;
      row.geometry = g;
      row.dtype = config.dtype;
      row.reps = config.reps;
      row.mean_seconds = elapsed.count() / config.reps;
      row.flops = flops(g, op);
      row.flops_unbatched = op == OpKind::dilated ? dilated_flops_unbatched(g) : row.flops;
      row.gflops = static_cast<double>(row.flops) / (row.mean_seconds * 1e9);
      row.macs = stats.macs;
      row.zeros_skipped = stats.zeros_skipped;
      row.checksum = warm_sum;
      rows.push_back(std::move(row));
    }
  }
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.reps < 1) throw ParameterError("bench: reps must be >= 1");
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < config.geometries.size(); ++i) {
    const ConvGeometry g = infer(config.geometries[i]);
    if (config.dtype == Dtype::f32) {
      bench_case<float>(config, static_cast<int>(i), g, rows);
    } else {
      bench_case<double>(config, static_cast<int>(i), g, rows);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool include_timing) {
  const auto old = os.precision(17);
  os << "case,op,impl,algorithm,n,ih,iw,ic,oc,fh,fw,sh,sw,ph,pw,oh,ow,dtype,reps,";
  if (include_timing) os << "mean_seconds,";
  os << "flops,flops_unbatched,";
  if (include_timing) os << "gflops,";
  os << "macs,zeros_skipped,checksum\n";
  for (const auto& r : rows) {
    const auto& g = r.geometry;
    os << r.case_index << ',' << to_string(r.op) << ',' << r.impl << ',' << r.algorithm << ',' << g.n << ',' << g.ih
       << ',' << g.iw << ',' << g.ic << ',' << g.oc << ',' << g.fh << ',' << g.fw << ',' << g.sh << ',' << g.sw << ','
       << g.ph << ',' << g.pw << ',' << g.oh << ',' << g.ow << ',' << to_string(r.dtype) << ',' << r.reps << ',';
    if (include_timing) os << r.mean_seconds << ',';
    os << r.flops << ',' << r.flops_unbatched << ',';
    if (include_timing) os << r.gflops << ',';
    os << r.macs << ',' << r.zeros_skipped << ',' << r.checksum << '\n';
  }
  os.precision(old);
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows, bool include_timing) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"case", r.case_index},
                        {"op", to_string(r.op)},
                        {"impl", r.impl},
                        {"algorithm", r.algorithm},
                        {"geometry", r.geometry},
                        {"dtype", to_string(r.dtype)},
                        {"reps", r.reps},
                        {"flops", r.flops},
                        {"flops_unbatched", r.flops_unbatched},
                        {"macs", r.macs},
                        {"zeros_skipped", r.zeros_skipped},
                        {"checksum", r.checksum}};
    if (include_timing) {
      j["mean_seconds"] = r.mean_seconds;
      j["gflops"] = r.gflops;
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace cks
