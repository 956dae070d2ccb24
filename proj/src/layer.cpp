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

#include "cks/layer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "cks/reference.hpp"

namespace cks {

template <Scalar T>
Conv2dLayer<T>::Conv2dLayer(const ConvGeometry& geometry, Tensor4<T> weights, Backend backend,
                            DispatchPolicy policy)
    : geometry_(infer(geometry)), weights_(std::move(weights)), backend_(backend), policy_(policy) {
  require_dims(weights_.dims(), geometry_.filter_dims(), "Conv2dLayer weights");
}

template <Scalar T>
Conv2dLayer<T> Conv2dLayer<T>::with_uniform_init(const ConvGeometry& geometry, std::uint64_t seed,
                                                 Backend backend) {
  const ConvGeometry g = infer(geometry);
  const double bound = 1.0 / std::sqrt(static_cast<double>(g.fh * g.fw * g.ic));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor4<T> w(g.filter_dims());
  for (auto& v : w.data()) v = static_cast<T>(dist(rng));
  return Conv2dLayer(g, std::move(w), backend);
}

template <Scalar T>
Tensor4<T> Conv2dLayer<T>::forward(const Tensor4<T>& x) {
  require_dims(x.dims(), geometry_.input_dims(), "Conv2dLayer::forward input");
  input_ = x;
  if (backend_ == Backend::reference) return reference::naive_conv2d(x, weights_, geometry_).value;
  return dispatch_conv(x, weights_, geometry_, policy_).value;
}

template <Scalar T>
typename Conv2dLayer<T>::Gradients Conv2dLayer<T>::backward(const Tensor4<T>& dy) const {
  if (!input_) throw StateError("Conv2dLayer::backward called before forward");
  require_dims(dy.dims(), geometry_.output_dims(), "Conv2dLayer::backward output gradient");
  if (backend_ == Backend::reference) {
    return {reference::naive_deconv2d(dy, weights_, geometry_).value,
            reference::naive_dilated_conv2d(*input_, dy, geometry_).value};
  }
  const KernelSplit<T>* cached = nullptr;
  if (cache_split_ && (geometry_.sh > 1 || geometry_.sw > 1)) {
    if (!split_) split_ = ks_split(weights_, geometry_);
    cached = &*split_;
  }
  return {dispatch_deconv(dy, weights_, geometry_, policy_, cached).value,
          dispatch_dilated(*input_, dy, geometry_, policy_).value};
}

template <Scalar T>
void Conv2dLayer<T>::set_weights(Tensor4<T> w) {
  require_dims(w.dims(), geometry_.filter_dims(), "Conv2dLayer weights");
  weights_ = std::move(w);
  split_.reset();
}

template <Scalar T>
void Conv2dLayer<T>::sgd_step(const Tensor4<T>& dw, T lr) {
  require_dims(dw.dims(), geometry_.filter_dims(), "Conv2dLayer::sgd_step gradient");
  auto w = weights_.data();
  auto g = dw.data();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
  split_.reset();
}

template <Scalar T>
void Conv2dLayer<T>::set_split_caching(bool enabled) {
  cache_split_ = enabled;
  if (!enabled) split_.reset();
}

template class Conv2dLayer<float>;
template class Conv2dLayer<double>;

Loss quadratic_loss(Tensor4<double> target) {
  auto t = std::make_shared<Tensor4<double>>(std::move(target));
  Loss loss;
  loss.value = [t](const Tensor4<double>& y) {
    require_dims(y.dims(), t->dims(), "quadratic_loss");
    double sum = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y.data()[i] - t->data()[i];
      sum += d * d;
    }
    return 0.5 * sum;
  };
  loss.gradient = [t](const Tensor4<double>& y) {
    require_dims(y.dims(), t->dims(), "quadratic_loss");
    Tensor4<double> g(y.dims());
    for (std::size_t i = 0; i < y.size(); ++i) g.data()[i] = y.data()[i] - t->data()[i];
    return g;
  };
  return loss;
}

namespace {

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1.0});
}

}  // namespace

GradCheckReport grad_check(const Conv2dLayer<double>& layer, const Tensor4<double>& x, const Loss& loss,
                           const GradCheckOptions& options) {
  if (!(options.eps >= 1e-7 && options.eps <= 1e-3)) throw ParameterError("grad_check: eps outside [1e-7, 1e-3]");
  Conv2dLayer<double> probe = layer;
  const auto y = probe.forward(x);
  auto grads = probe.backward(loss.gradient(y));
  if (options.tamper) options.tamper(grads.dx, grads.dw);

  const double eps = options.eps;
  GradCheckReport report;

  Tensor4<double> xp = x;
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const double saved = xp.data()[i];
    xp.data()[i] = saved + eps;
    const double up = loss.value(probe.forward(xp));
    xp.data()[i] = saved - eps;
    const double down = loss.value(probe.forward(xp));
    xp.data()[i] = saved;
    report.max_rel_error_input =
        std::max(report.max_rel_error_input, rel_error(grads.dx.data()[i], (up - down) / (2 * eps)));
  }

  Tensor4<double> w = layer.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double saved = w.data()[i];
    w.data()[i] = saved + eps;
    probe.set_weights(w);
    const double up = loss.value(probe.forward(x));
    w.data()[i] = saved - eps;
    probe.set_weights(w);
    const double down = loss.value(probe.forward(x));
    w.data()[i] = saved;
    report.max_rel_error_weights =
        std::max(report.max_rel_error_weights, rel_error(grads.dw.data()[i], (up - down) / (2 * eps)));
  }
  report.max_rel_error = std::max(report.max_rel_error_input, report.max_rel_error_weights);
  return report;
}

std::vector<TracePoint> smoke_train(const TrainConfig& config) {
  if (config.steps < 0 || config.record_every < 1) throw ParameterError("smoke_train: bad step counts");
  const ConvGeometry g1 = infer(config.first);
  const ConvGeometry g2 = infer(config.second);
  if (g1.output_dims() != g2.input_dims()) throw ShapeError("smoke_train: layer shapes do not chain");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Tensor4<double> x(g1.input_dims());
  for (auto& v : x.data()) v = unit(rng);

  // Teacher and student draw from disjoint seed streams.
  auto teacher1 = Conv2dLayer<double>::with_uniform_init(g1, config.seed * 4 + 1, Backend::reference);
  auto teacher2 = Conv2dLayer<double>::with_uniform_init(g2, config.seed * 4 + 2, Backend::reference);
  const Tensor4<double> target = teacher2.forward(teacher1.forward(x));

  auto layer1 = Conv2dLayer<double>::with_uniform_init(g1, config.seed * 4 + 3, config.backend);
  auto layer2 = Conv2dLayer<double>::with_uniform_init(g2, config.seed * 4 + 4, config.backend);
  const double scale = 1.0 / static_cast<double>(target.size());

  std::vector<TracePoint> trace;
  for (int step = 0; step <= config.steps; ++step) {
    const auto y = layer2.forward(layer1.forward(x));
    Tensor4<double> dy(y.dims());
    double loss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y.data()[i] - target.data()[i];
      loss += d * d;
      dy.data()[i] = d * scale;
    }
    loss *= 0.5 * scale;
    if (!std::isfinite(loss)) throw TrainingError("smoke_train: loss diverged at step " + std::to_string(step));
    if (step % config.record_every == 0) trace.push_back({step, loss});
    if (step == config.steps) break;

    const auto g2grads = layer2.backward(dy);
    const auto g1grads = layer1.backward(g2grads.dx);
    layer2.sgd_step(g2grads.dw, config.learning_rate);
    layer1.sgd_step(g1grads.dw, config.learning_rate);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  const auto old = os.precision(17);
  os << "step,loss\n";
  for (const auto& p : trace) os << p.step << ',' << p.loss << '\n';
  os.precision(old);
}

}  // namespace cks
