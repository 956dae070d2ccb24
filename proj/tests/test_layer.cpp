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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cks/layer.hpp"
#include "cks/verify.hpp"

namespace cks {
namespace {

ConvGeometry strided_layer() {
  return infer({.n = 2, .ih = 7, .iw = 6, .ic = 2, .oc = 3, .fh = 3, .fw = 3, .sh = 2, .sw = 2, .ph = 1, .pw = 1});
}

TEST(Layer, HandCaseThroughTheLayer) {
  Conv2dLayer<double> layer(infer({.iw = 4, .fw = 2, .sw = 2}), Tensor4<double>({1, 1, 2, 1}, {2, 3}));
  const auto y = layer.forward(Tensor4<double>({1, 1, 4, 1}, {1, 2, 3, 4}));
  EXPECT_EQ(y.values(), (std::vector<double>{8, 18}));
  const auto grads = layer.backward(Tensor4<double>({1, 1, 2, 1}, {1, 10}));
  EXPECT_EQ(grads.dx.values(), (std::vector<double>{2, 3, 20, 30}));
  EXPECT_EQ(grads.dw.values(), (std::vector<double>{31, 42}));
}

TEST(Layer, BackwardBeforeForwardThrows) {
  const auto layer = Conv2dLayer<double>::with_uniform_init(strided_layer(), 1);
  EXPECT_THROW(layer.backward(Tensor4<double>(strided_layer().output_dims())), StateError);
}

TEST(Layer, RejectsWrongShapes) {
  const auto g = strided_layer();
  EXPECT_THROW(Conv2dLayer<double>(g, Tensor4<double>({1, 1, 1, 1})), ShapeError);
  auto layer = Conv2dLayer<double>::with_uniform_init(g, 1);
  EXPECT_THROW(layer.forward(Tensor4<double>({1, 1, 1, 1})), ShapeError);
  EXPECT_THROW(layer.set_weights(Tensor4<double>({1, 1, 1, 1})), ShapeError);
}

TEST(Layer, UniformInitBounds) {
  const auto g = strided_layer();
  const auto layer = Conv2dLayer<double>::with_uniform_init(g, 5);
  const double k = 1.0 / std::sqrt(static_cast<double>(g.fh * g.fw * g.ic));
  for (double v : layer.weights().data()) {
    EXPECT_LE(std::abs(v), k);
  }
  EXPECT_EQ(layer.weights(), Conv2dLayer<double>::with_uniform_init(g, 5).weights());
  EXPECT_NE(layer.weights(), Conv2dLayer<double>::with_uniform_init(g, 6).weights());
}

TEST(Layer, BackendsAgreeExactly) {
  const auto g = strided_layer();
  std::mt19937_64 rng(4);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto dy = random_tensor<double>(g.output_dims(), rng);
  auto fast = Conv2dLayer<double>::with_uniform_init(g, 9, Backend::cks);
  auto slow = Conv2dLayer<double>::with_uniform_init(g, 9, Backend::reference);
  EXPECT_EQ(fast.forward(x), slow.forward(x));
  const auto a = fast.backward(dy);
  const auto b = slow.backward(dy);
  EXPECT_EQ(a.dx, b.dx);
  EXPECT_EQ(a.dw, b.dw);
}

TEST(Layer, SplitCacheFollowsWeightUpdates) {
  const auto g = strided_layer();
  std::mt19937_64 rng(12);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto dy = random_tensor<double>(g.output_dims(), rng);
  auto cached = Conv2dLayer<double>::with_uniform_init(g, 2);
  auto plain = Conv2dLayer<double>::with_uniform_init(g, 2);
  cached.set_split_caching(true);
  for (int step = 0; step < 3; ++step) {
    cached.forward(x);
    plain.forward(x);
    const auto a = cached.backward(dy);
    const auto b = plain.backward(dy);
    EXPECT_EQ(a.dx, b.dx);
    cached.sgd_step(a.dw, 0.1);
    plain.sgd_step(b.dw, 0.1);
  }
}

TEST(GradCheck, PassesOnStridedLayer) {
  const auto g = strided_layer();
  std::mt19937_64 rng(21);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto layer = Conv2dLayer<double>::with_uniform_init(g, 3);
  const auto report = grad_check(layer, x, quadratic_loss(random_tensor<double>(g.output_dims(), rng)));
  EXPECT_LT(report.max_rel_error, 1e-5);
}

TEST(GradCheck, DetectsTamperedGradients) {
  const auto g = strided_layer();
  std::mt19937_64 rng(22);
  const auto x = random_tensor<double>(g.input_dims(), rng);
  const auto layer = Conv2dLayer<double>::with_uniform_init(g, 3);
  GradCheckOptions options;
  options.tamper = [](Tensor4<double>&, Tensor4<double>& dw) { dw.data()[0] += 0.5; };
  const auto report = grad_check(layer, x, quadratic_loss(random_tensor<double>(g.output_dims(), rng)), options);
  EXPECT_GT(report.max_rel_error_weights, 1e-2);
  EXPECT_LT(report.max_rel_error_input, 1e-5);
}

TEST(GradCheck, EpsilonRange) {
  const auto g = strided_layer();
  const auto layer = Conv2dLayer<double>::with_uniform_init(g, 3);
  const Tensor4<double> x(g.input_dims());
  const auto loss = quadratic_loss(Tensor4<double>(g.output_dims()));
  GradCheckOptions options;
  options.eps = 1e-2;
  EXPECT_THROW(grad_check(layer, x, loss, options), ParameterError);
  options.eps = 1e-9;
  EXPECT_THROW(grad_check(layer, x, loss, options), ParameterError);
}

TEST(Training, LossFallsAndBackendsPair) {
  const auto fast = smoke_train({.steps = 200});
  const auto slow = smoke_train({.steps = 200, .backend = Backend::reference});
  ASSERT_EQ(fast.size(), 21u);
  ASSERT_EQ(slow.size(), fast.size());
  EXPECT_LT(fast.back().loss, 0.5 * fast.front().loss);
  for (std::size_t i = 0; i < fast.size(); ++i) {
    EXPECT_EQ(fast[i].step, slow[i].step);
    EXPECT_NEAR(fast[i].loss, slow[i].loss, 1e-12);
  }
}

TEST(Training, DivergenceIsReported) {
  EXPECT_THROW(smoke_train({.steps = 400, .learning_rate = 1e4}), TrainingError);
  EXPECT_THROW(smoke_train({.record_every = 0}), ParameterError);
}

TEST(Training, TraceCsv) {
  std::ostringstream os;
  write_trace_csv(os, {{0, 1.5}, {10, 0.25}});
  EXPECT_EQ(os.str(), "step,loss\n0,1.5\n10,0.25\n");
}

}  // namespace
}  // namespace cks
