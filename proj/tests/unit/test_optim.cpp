// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "deskip/optim.hpp"

namespace deskip {
namespace {

ParamStore64 one_param(double v) {
  ParamStore64 p;
  p.add("w", Tensor64({2}, v));
  return p;
}

TEST(Sgd, ZeroLearningRateLeavesParams) {
  auto p = one_param(1.5);
  const Tensor64 g({2}, 0.3);
  SgdState<double> st;
  sgd_step(p, {&g}, st, {0.0, 0.9, 5e-4});
  EXPECT_EQ(p.at("w"), Tensor64({2}, 1.5));
}

TEST(Sgd, PlainStep) {
  auto p = one_param(1.0);
  const Tensor64 g({2}, 0.5);
  SgdState<double> st;
  sgd_step(p, {&g}, st, {0.1, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(p.at("w")[0], 1.0 - 0.1 * 0.5);
}

// v1 = g, v2 = 0.9 g + g: total delta = lr * g * (1 + 1.9)
TEST(Sgd, TwoMomentumStepsOnFixedGradient) {
  auto p = one_param(0.0);
  const Tensor64 g({2}, 2.0);
  SgdState<double> st;
  sgd_step(p, {&g}, st, {0.01, 0.9, 0.0});
  sgd_step(p, {&g}, st, {0.01, 0.9, 0.0});
  EXPECT_NEAR(p.at("w")[0], -0.01 * 2.0 * 2.9, 1e-15);
}

TEST(Sgd, WeightDecayEntersVelocity) {
  auto p = one_param(2.0);
  const Tensor64 g({2}, 0.0);
  SgdState<double> st;
  sgd_step(p, {&g}, st, {0.1, 0.0, 0.5});
  EXPECT_DOUBLE_EQ(p.at("w")[0], 2.0 - 0.1 * 0.5 * 2.0);
}

TEST(Sgd, NullGradientSkipsEntry) {
  ParamStore64 p;
  p.add("a", Tensor64({1}, 1.0));
  p.add("stat", Tensor64({1}, 5.0), false);
  const Tensor64 g({1}, 1.0);
  SgdState<double> st;
  sgd_step(p, {&g, nullptr}, st, {0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(p.at("a")[0], 0.5);
  EXPECT_DOUBLE_EQ(p.at("stat")[0], 5.0);
}

TEST(Sgd, ShapeMismatchThrows) {
  auto p = one_param(0.0);
  const Tensor64 g({3}, 1.0);
  SgdState<double> st;
  EXPECT_THROW(sgd_step(p, {&g}, st, {0.1, 0.0, 0.0}), ShapeError);
}

}  // namespace
}  // namespace deskip
