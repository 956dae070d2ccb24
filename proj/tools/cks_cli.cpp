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

// Command-line front end: verify | bench | analyze | train.
//
// Exit status: 0 success, 1 verification or runtime failure, 2 usage error.

#include <omp.h>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cks/analyze.hpp"
#include "cks/bench.hpp"
#include "cks/errors.hpp"
#include "cks/layer.hpp"
#include "cks/verify.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kFailure = 1;

// Output to a file, or stdout for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw cks::IoError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw cks::IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::vector<cks::ConvGeometry> load_geometries(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw cks::IoError("cannot open geometry file " + path);
  const auto j = nlohmann::json::parse(is);
  std::vector<cks::ConvGeometry> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(item.get<cks::ConvGeometry>());
  } else {
    out.push_back(j.get<cks::ConvGeometry>());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-skipping convolution operators: verification, benchmarks, analysis"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 0;

  auto* verify = app.add_subcommand("verify", "Randomized oracle-equivalence and invariant sweep");
  int cases = 100;
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--cases", cases, "Number of random geometries")->check(CLI::NonNegativeNumber);
  verify->add_option("--threads", threads, "OpenMP worker count (0 = runtime default)");

  auto* bench = app.add_subcommand("bench", "Timing and MAC-count report");
  std::string suite = "paper-3x3";
  std::string op = "all";
  int reps = 10;
  std::string dtype = "f32";
  bool deterministic = false;
  bool no_timing = false;
  std::string out = "-";
  std::string format = "csv";
  std::string geometry_file;
  bench->add_option("--suite", suite)->check(CLI::IsMember({"paper-3x3", "paper-5x5", "custom"}));
  bench->add_option("--op", op)->check(CLI::IsMember({"conv", "deconv", "dilated", "all"}));
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber);
  bench->add_option("--dtype", dtype)->check(CLI::IsMember({"f32", "f64"}));
  bench->add_option("--threads", threads, "OpenMP worker count (0 = runtime default)");
  bench->add_flag("--deterministic", deterministic, "Fixed segment counts and serial partial folds");
  bench->add_flag("--no-timing", no_timing, "Omit wall-time columns");
  bench->add_option("--out", out, "Output path, - for stdout");
  bench->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--geometry", geometry_file, "JSON geometry (or array) for --suite custom");
  bench->add_option("--seed", seed, "RNG seed for operand data");

  auto* analyze = app.add_subcommand("analyze", "Zero-proportion curves");
  std::string kind;
  std::string range;
  std::vector<std::string> fixed_args;
  analyze->add_option("--kind", kind)->required()->check(CLI::IsMember({"pad-fraction", "insert-fraction"}));
  analyze->add_option("--range", range, "Inclusive sweep A:B")->required();
  analyze->add_option("--fixed", fixed_args, "Fixed parameters k=v");
  analyze->add_option("--out", out, "Output path, - for stdout");

  auto* train = app.add_subcommand("train", "Two-layer smoke training run; loss trace as CSV");
  cks::TrainConfig train_config;
  std::string backend = "cks";
  train->add_option("--seed", train_config.seed);
  train->add_option("--steps", train_config.steps)->check(CLI::NonNegativeNumber);
  train->add_option("--lr", train_config.learning_rate);
  train->add_option("--backend", backend)->check(CLI::IsMember({"cks", "reference"}));
  train->add_option("--out", out, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*verify) {
      set_threads(threads);
      const auto result = cks::run_verify({.seed = seed, .cases = cases});
      std::cout << result.summary.dump(2) << '\n';
      if (!result.ok) {
        for (const auto& f : result.summary["failures"]) {
          std::cerr << "FAIL " << f["op"].get<std::string>() << " [" << f["dims"].get<std::string>()
                    << "]: " << f["reason"].get<std::string>() << '\n';
        }
        return kFailure;
      }
      return 0;
    }

    if (*bench) {
      set_threads(threads);
      cks::BenchConfig config;
      if (suite == "custom") {
        if (geometry_file.empty()) throw cks::ParameterError("--suite custom needs --geometry FILE");
        config.geometries = load_geometries(geometry_file);
      } else {
        config.geometries = cks::suite_geometries(suite);
      }
      if (op != "all") config.ops = {cks::op_kind_from_string(op)};
      config.reps = reps;
      config.dtype = cks::dtype_from_string(dtype);
      config.deterministic = deterministic;
      config.seed = seed;
      const auto rows = cks::run_bench(config);
      Sink sink(out);
      if (format == "json") {
        sink.stream() << cks::bench_json(rows, !no_timing).dump(2) << '\n';
      } else {
        cks::write_bench_csv(sink.stream(), rows, !no_timing);
      }
      sink.finish();
      return 0;
    }

    if (*analyze) {
      std::map<std::string, std::int64_t> fixed;
      for (const auto& arg : fixed_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw cks::ParameterError("--fixed expects k=v, got '" + arg + "'");
        fixed[arg.substr(0, eq)] = cks::parse_range("0:" + arg.substr(eq + 1)).to;
      }
      const auto curve_kind = cks::curve_kind_from_string(kind);
      const auto points = cks::analyze_curve(curve_kind, cks::parse_range(range), fixed);
      Sink sink(out);
      cks::write_curve_csv(sink.stream(), curve_kind, points);
      sink.finish();
      return 0;
    }

    if (*train) {
      train_config.backend = backend == "reference" ? cks::Backend::reference : cks::Backend::cks;
      const auto trace = cks::smoke_train(train_config);
      Sink sink(out);
      cks::write_trace_csv(sink.stream(), trace);
      sink.finish();
      return 0;
    }
  } catch (const cks::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const cks::GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return 0;
}
