// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numeric>

#include "deskip/dataset.hpp"
#include "deskip/net.hpp"
#include "deskip/optim.hpp"
#include "deskip/tape.hpp"

namespace {

using namespace deskip;

// One SGD step of the depth-14 desk network on a batch of 32.
void BM_TrainStep(benchmark::State& state) {
  SyntheticParams p;
  p.train_per_class = 4;
  p.val_per_class = 0;
  p.test_per_class = 0;
  const Dataset d = make_synthetic(p);
  const auto kind = static_cast<SkipKind>(state.range(0));
  const NetGraph g = build_net(NetSpec::uniform(2, {8, 16, 32}, 10, 1, kind), 0);
  ParamStore params = g.params();
  SgdState<float> sgd;
  std::vector<std::size_t> idx(32);
  std::iota(idx.begin(), idx.end(), 0);
  const Tensor x = d.batch_images(Split::Train, idx);
  const auto labels = d.batch_labels(Split::Train, idx);
  for (auto _ : state) {
    Tape<float> tape;
    auto f = forward(tape, g, params, x, BnMode::Train);
    const Var loss = tape.softmax_xent(f.logits, labels);
    tape.backward(loss);
    std::vector<const Tensor*> grads;
    for (const Var v : f.param_vars) grads.push_back(v.valid() ? &tape.grad(v) : nullptr);
    sgd_step(params, grads, sgd, {});
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->ArgName("skip")->Arg(int(SkipKind::Full))->Arg(int(SkipKind::None))
    ->Unit(benchmark::kMillisecond);

}  // namespace
