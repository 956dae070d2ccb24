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
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "cks/geometry.hpp"
#include "cks/ops.hpp"
#include "cks/tensor.hpp"

namespace cks {

// Which operator family a layer runs.
enum class Backend {
  cks,        // dispatch_conv / dispatch_deconv / dispatch_dilated
  reference,  // cks::reference naive operators
};

/// A 2-D conv layer: forward is conv(X, W); backward returns
/// dX = deconv(dY, W) and dW = dilated(X, dY) on the input cached by forward.
///
/// Not thread-safe: forward mutates the input cache.
template <Scalar T>
class Conv2dLayer {
 public:
  struct Gradients {
    Tensor4<T> dx;
    Tensor4<T> dw;
  };

  Conv2dLayer(const ConvGeometry& geometry, Tensor4<T> weights, Backend backend = Backend::cks,
              DispatchPolicy policy = {});

  // Weights uniform in [-k, k], k = (F_H*F_W*I_C)^(-1/2).
  static Conv2dLayer with_uniform_init(const ConvGeometry& geometry, std::uint64_t seed,
                                       Backend backend = Backend::cks);

  Tensor4<T> forward(const Tensor4<T>& x);

  // Throws StateError when called before forward.
  Gradients backward(const Tensor4<T>& dy) const;

  const ConvGeometry& geometry() const noexcept { return geometry_; }
  const Tensor4<T>& weights() const noexcept { return weights_; }
  void set_weights(Tensor4<T> w);

  // w -= lr * dw
  void sgd_step(const Tensor4<T>& dw, T lr);

  // Keep the kernel split across backward calls until the weights change.
  void set_split_caching(bool enabled);

 private:
  ConvGeometry geometry_;
  Tensor4<T> weights_;
  Backend backend_;
  DispatchPolicy policy_;
  std::optional<Tensor4<T>> input_;
  bool cache_split_ = false;
  mutable std::optional<KernelSplit<T>> split_;
};

// Scalar loss of the layer output with its gradient.
struct Loss {
  std::function<double(const Tensor4<double>&)> value;
  std::function<Tensor4<double>(const Tensor4<double>&)> gradient;
};

// 0.5 * sum((y - target)^2)
Loss quadratic_loss(Tensor4<double> target);

struct GradCheckOptions {
  double eps = 1e-5;
  // Applied to the analytic gradients before comparison (fault injection).
  std::function<void(Tensor4<double>& dx, Tensor4<double>& dw)> tamper;
};

struct GradCheckReport {
  double max_rel_error = 0;
  double max_rel_error_input = 0;
  double max_rel_error_weights = 0;
};

// Central finite differences of loss(forward(x)) w.r.t. every entry of x and
// W, compared with backward(). Relative error per entry is
// |a - f| / max(|a|, |f|, 1). eps must lie in [1e-7, 1e-3].
GradCheckReport grad_check(const Conv2dLayer<double>& layer, const Tensor4<double>& x, const Loss& loss,
                           const GradCheckOptions& options = {});

/// Synthetic regression with two conv layers (the second strided), trained
/// by plain gradient descent towards a fixed random teacher network of the
/// same shape.
struct TrainConfig {
  std::uint64_t seed = 0;
  int steps = 500;
  int record_every = 10;
  double learning_rate = 0.3;
  Backend backend = Backend::cks;
  ConvGeometry first = infer({.n = 4, .ih = 8, .iw = 8, .ic = 2, .oc = 4, .fh = 3, .fw = 3, .ph = 1, .pw = 1});
  ConvGeometry second = infer(
      {.n = 4, .ih = 8, .iw = 8, .ic = 4, .oc = 2, .fh = 3, .fw = 3, .sh = 2, .sw = 2, .ph = 1, .pw = 1});
};

struct TracePoint {
  int step = 0;
  double loss = 0;
};

// Loss at step 0 and every record_every steps up to `steps` inclusive.
// Throws TrainingError when the loss stops being finite.
std::vector<TracePoint> smoke_train(const TrainConfig& config);

// "step,loss" header plus one row per point.
void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace);

}  // namespace cks
