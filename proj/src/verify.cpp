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

#include "cks/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "cks/gemm.hpp"
#include "cks/ops.hpp"
#include "cks/reference.hpp"

namespace cks {

ConvGeometry random_geometry(std::mt19937_64& rng) {
  static constexpr std::array<std::int64_t, 5> kFilters{1, 2, 3, 5, 7};
  static constexpr std::array<std::int64_t, 3> kChannels{1, 3, 4};
  auto pick = [&rng](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  for (;;) {
    ConvGeometry g;
    g.n = pick(1, 2);
    g.ih = pick(4, 12);
    g.iw = pick(4, 12);
    g.ic = kChannels[static_cast<std::size_t>(pick(0, 2))];
    g.oc = kChannels[static_cast<std::size_t>(pick(0, 2))];
    g.fh = kFilters[static_cast<std::size_t>(pick(0, 4))];
    g.fw = kFilters[static_cast<std::size_t>(pick(0, 4))];
    g.sh = pick(1, 4);
    g.sw = pick(1, 4);
    g.ph = pick(0, std::min<std::int64_t>(3, g.fh - 1));
    g.pw = pick(0, std::min<std::int64_t>(3, g.fw - 1));
    if (g.fh > g.ih + 2 * g.ph || g.fw > g.iw + 2 * g.pw) continue;
    return infer(g);
  }
}

template <Scalar T>
Tensor4<T> random_tensor(const Dims4& dims, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor4<T> t(dims);
  for (auto& v : t.data()) v = static_cast<T>(dist(rng));
  return t;
}

template <Scalar A, Scalar B>
double max_rel_error(const Tensor4<A>& a, const Tensor4<B>& b) {
  if (a.dims() != b.dims()) return std::numeric_limits<double>::infinity();
  double diff = 0;
  double scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i])));
    scale = std::max(scale, std::abs(static_cast<double>(b.data()[i])));
  }
  return scale > 0 ? diff / scale : diff;
}

template <Scalar T>
double inner_product(const Tensor4<T>& a, const Tensor4<T>& b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a.data()[i]) * static_cast<double>(b.data()[i]);
  return sum;
}

template Tensor4<float> random_tensor(const Dims4&, std::mt19937_64&, double, double);
template Tensor4<double> random_tensor(const Dims4&, std::mt19937_64&, double, double);
template double max_rel_error(const Tensor4<double>&, const Tensor4<double>&);
template double max_rel_error(const Tensor4<float>&, const Tensor4<double>&);
template double max_rel_error(const Tensor4<float>&, const Tensor4<float>&);
template double inner_product(const Tensor4<double>&, const Tensor4<double>&);
template double inner_product(const Tensor4<float>&, const Tensor4<float>&);

namespace {

std::optional<std::string> exact_deconv_reduction(const ConvGeometry& g, const OpStats& own, const OpStats& ref) {
  if (g.ih % g.sh != 0 || g.iw % g.sw != 0) return std::nullopt;
  if (own.macs * static_cast<std::uint64_t>(g.sh * g.sw) != ref.macs) {
    return "macs " + std::to_string(own.macs) + " != reference " + std::to_string(ref.macs) + " / (sh*sw)";
  }
  return std::nullopt;
}

std::optional<std::string> exact_dilated_reduction(const ConvGeometry& g, const OpStats& own, const OpStats& ref) {
  const auto inserted = static_cast<std::uint64_t>(g.oh_inserted() * g.ow_inserted());
  const auto dense = static_cast<std::uint64_t>(g.oh * g.ow);
  if (own.macs * inserted != ref.macs * dense) {
    return "macs " + std::to_string(own.macs) + " != reference " + std::to_string(ref.macs) +
           " * nonzero_calc_fraction";
  }
  return std::nullopt;
}

template <Scalar T>
using Oracle = OpResult<T> (*)(const Tensor4<T>&, const Tensor4<T>&, const ConvGeometry&);

template <Scalar T>
Oracle<T> oracle_for(OpKind kind) {
  switch (kind) {
    case OpKind::conv:
      return &reference::naive_conv2d<T>;
    case OpKind::deconv:
      return &reference::naive_deconv2d<T>;
    case OpKind::dilated:
      return &reference::naive_dilated_conv2d<T>;
  }
  return nullptr;
}

struct OpTally {
  double max_err64 = 0;
  double max_err32 = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  int failures = 0;
};

}  // namespace

std::vector<OpUnderTest> default_ops() {
  std::vector<OpUnderTest> ops;
  // `run` is generic over the scalar type and serves both precisions.
  auto add = [&ops](std::string name, OpKind kind, auto run, bool exact = true, double tolerance64 = 1e-12,
                    OpUnderTest::MacRule rule = {}) {
    OpUnderTest op;
    op.name = std::move(name);
    op.kind = kind;
    op.run64 = run;
    op.run32 = run;
    op.exact = exact;
    op.tolerance64 = tolerance64;
    op.mac_rule = std::move(rule);
    ops.push_back(std::move(op));
  };
  add("conv_v2", OpKind::conv, [](const auto& a, const auto& b, const auto& g) { return conv_v2(a, b, g); });
  add("conv_v2_transposed", OpKind::conv,
      [](const auto& a, const auto& b, const auto& g) { return conv_v2(a, b, g, FilterLayout::fh_fw_ic_oc); });
  add("gemm_conv2d", OpKind::conv, [](const auto& a, const auto& b, const auto& g) { return gemm_conv2d(a, b, g); });
  add("ks_deconv", OpKind::deconv,
      [](const auto& a, const auto& b, const auto& g) { return ks_deconv(a, ks_split(b, g), g); }, true, 1e-12,
      exact_deconv_reduction);
  add("ks_deconv_v2", OpKind::deconv,
      [](const auto& a, const auto& b, const auto& g) { return ks_deconv_v2(a, ks_split(b, g), g); });
  add("sk_dilated", OpKind::dilated, [](const auto& a, const auto& b, const auto& g) { return sk_dilated(a, b, g); },
      true, 1e-12, exact_dilated_reduction);
  add("sk_dilated_v2", OpKind::dilated,
      [](const auto& a, const auto& b, const auto& g) { return sk_dilated_v2(a, b, g); });
  add("partitioned_dilated_gz1", OpKind::dilated,
      [](const auto& a, const auto& b, const auto& g) { return partitioned_dilated(a, b, g, 1); });
  add("partitioned_dilated_gzK", OpKind::dilated,
      [](const auto& a, const auto& b, const auto& g) { return partitioned_dilated(a, b, g, g.n * g.oh * g.ow); },
      false);
  add("dispatch_conv", OpKind::conv, [](const auto& a, const auto& b, const auto& g) { return dispatch_conv(a, b, g); });
  add("dispatch_deconv", OpKind::deconv,
      [](const auto& a, const auto& b, const auto& g) { return dispatch_deconv(a, b, g); });
  add("dispatch_dilated", OpKind::dilated,
      [](const auto& a, const auto& b, const auto& g) { return dispatch_dilated(a, b, g); });
  return ops;
}

VerifyResult run_verify(const VerifyOptions& options, const std::vector<OpUnderTest>& ops) {
  using nlohmann::json;
  std::mt19937_64 rng(options.seed);
  std::map<std::string, OpTally> tallies;
  OpTally adjoint;
  OpTally deconv_forms;
  json failures = json::array();
  bool ok = true;

  auto fail = [&](const std::string& op, const ConvGeometry& g, const std::string& reason) {
    ok = false;
    failures.push_back({{"op", op}, {"geometry", g}, {"dims", g.to_string()}, {"reason", reason}});
  };

  for (int c = 0; c < options.cases; ++c) {
    const ConvGeometry g = random_geometry(rng);
    // Operands are rounded to float first so both widths see identical inputs.
    const auto x = cast<double>(random_tensor<float>(g.input_dims(), rng));
    const auto w = cast<double>(random_tensor<float>(g.filter_dims(), rng));
    const auto dy = cast<double>(random_tensor<float>(g.output_dims(), rng));

    auto operands = [&](OpKind kind) -> std::pair<const Tensor4<double>&, const Tensor4<double>&> {
      switch (kind) {
        case OpKind::conv:
          return {x, w};
        case OpKind::deconv:
          return {dy, w};
        case OpKind::dilated:
          break;
      }
      return {x, dy};
    };

    std::map<OpKind, OpResult<double>> refs;
    for (OpKind kind : {OpKind::conv, OpKind::deconv, OpKind::dilated}) {
      auto [a, b] = operands(kind);
      refs.emplace(kind, oracle_for<double>(kind)(a, b, g));
      if (refs.at(kind).stats.macs != oracle_macs(g, kind)) {
        fail(std::string("reference_") + to_string(kind), g, "instrumented MACs disagree with the flop formula");
      }
    }

    {
      const auto scattered = reference::scatter_deconv2d(dy, w, g);
      const double err = max_rel_error(scattered, refs.at(OpKind::deconv).value);
      deconv_forms.max_err64 = std::max(deconv_forms.max_err64, err);
      if (!(scattered == refs.at(OpKind::deconv).value)) {
        ++deconv_forms.failures;
        fail("reference_deconv_forms", g, "scatter and zero-insertion forms differ");
      }
    }

    {
      const double lhs = inner_product(refs.at(OpKind::conv).value, dy);
      const double via_x = inner_product(x, refs.at(OpKind::deconv).value);
      const double via_w = inner_product(w, refs.at(OpKind::dilated).value);
      const double scale = std::max({std::abs(lhs), std::abs(via_x), std::abs(via_w), 1e-300});
      const double err = std::max(std::abs(lhs - via_x), std::abs(lhs - via_w)) / scale;
      adjoint.max_err64 = std::max(adjoint.max_err64, err);
      if (err > options.adjoint_tolerance) {
        ++adjoint.failures;
        fail("adjoint", g, "inner-product identity off by " + std::to_string(err));
      }
    }

    for (const auto& op : ops) {
      auto& tally = tallies[op.name];
      const auto& ref = refs.at(op.kind);
      auto [a, b] = operands(op.kind);
      try {
        const auto r64 = op.run64(a, b, g);
        const double err64 = max_rel_error(r64.value, ref.value);
        tally.max_err64 = std::max(tally.max_err64, err64);
        if (op.exact ? !(r64.value == ref.value) : !(err64 <= op.tolerance64)) {
          ++tally.failures;
          fail(op.name, g, "64-bit values differ from reference (rel err " + std::to_string(err64) + ")");
        }
        if (r64.stats.macs > ref.stats.macs || r64.stats.macs + r64.stats.zeros_skipped != ref.stats.macs) {
          ++tally.failures;
          fail(op.name, g, "MAC accounting does not add up to the reference count");
        }
        const double ratio = static_cast<double>(r64.stats.macs) / static_cast<double>(ref.stats.macs);
        tally.min_ratio = std::min(tally.min_ratio, ratio);
        tally.max_ratio = std::max(tally.max_ratio, ratio);
        if (op.mac_rule) {
          if (auto why = op.mac_rule(g, r64.stats, ref.stats)) {
            ++tally.failures;
            fail(op.name, g, *why);
          }
        }
        const auto r32 = op.run32(cast<float>(a), cast<float>(b), g);
        const double err32 = max_rel_error(r32.value, ref.value);
        tally.max_err32 = std::max(tally.max_err32, err32);
        if (!(err32 <= options.tolerance32)) {
          ++tally.failures;
          fail(op.name, g, "32-bit values off by " + std::to_string(err32));
        }
        if (r32.stats != r64.stats) {
          ++tally.failures;
          fail(op.name, g, "32-bit and 64-bit MAC counts differ");
        }
      } catch (const std::exception& e) {
        ++tally.failures;
        fail(op.name, g, std::string("threw: ") + e.what());
      }
    }
  }

  json summary;
  summary["seed"] = options.seed;
  summary["cases"] = options.cases;
  summary["ops"] = json::object();
  for (const auto& [name, t] : tallies) {
    summary["ops"][name] = {{"status", t.failures == 0 ? "pass" : "fail"},
                            {"failures", t.failures},
                            {"max_rel_error_f64", t.max_err64},
                            {"max_rel_error_f32", t.max_err32},
                            {"mac_ratio_min", t.min_ratio},
                            {"mac_ratio_max", t.max_ratio}};
  }
  summary["invariants"] = json::object();
  if (options.cases > 0) {
    summary["invariants"]["adjoint"] = {{"status", adjoint.failures == 0 ? "pass" : "fail"},
                                        {"max_rel_error", adjoint.max_err64}};
    summary["invariants"]["reference_deconv_forms"] = {{"status", deconv_forms.failures == 0 ? "pass" : "fail"},
                                                       {"max_rel_error", deconv_forms.max_err64}};
  }
  summary["failures"] = failures;
  summary["status"] = ok ? "pass" : "fail";
  return {ok, summary};
}

}  // namespace cks
