// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "gradcheck.hpp"

#include <functional>
#include <memory>

#include "deskip/net.hpp"
#include "deskip/tape.hpp"
#include "oracles.hpp"

namespace deskip::testing {

namespace {

using Builder = std::function<Var(Tape<double>&, const std::vector<Var>&)>;

struct Probe {
  std::vector<Tensor64> inputs;
  Builder build;
  ConvAlgo algo = ConvAlgo::Im2col;
  bool scalar_output = false;
};

void merge(FdReport& into, const FdReport& r) {
  if (r.checked == 0) return;
  if (into.checked == 0 || r.max_rel_err > into.max_rel_err) {
    const auto total = into.checked + r.checked;
    into = r;
    into.checked = total;
  } else {
    into.checked += r.checked;
  }
}

FdReport check_probe(Probe& p, Rng& rng) {
  Tensor64 weights;
  auto record = [&](Tape<double>& tape, std::vector<Var>& leaves) {
    leaves.clear();
    for (const auto& t : p.inputs) leaves.push_back(tape.parameter(t));
    Var y = p.build(tape, leaves);
    if (p.scalar_output) return y;
    if (weights.empty()) weights = random_tensor(tape.value(y).shape(), rng);
    return tape.weighted_sum(y, weights);
  };

  Tape<double> tape(p.algo);
  std::vector<Var> leaves;
  Var loss = record(tape, leaves);
  tape.backward(loss);
  std::vector<Tensor64> analytic;
  for (Var v : leaves) analytic.push_back(tape.grad(v));

  auto eval = [&] {
    Tape<double> t(p.algo);
    std::vector<Var> l;
    Var out = record(t, l);
    return t.value(out)[0];
  };
  FdReport rep;
  for (std::size_t i = 0; i < p.inputs.size(); ++i) {
    merge(rep, check_gradient(p.inputs[i], analytic[i], eval, all_coords(p.inputs[i].size())));
  }
  return rep;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Values bounded away from zero so ReLU kinks stay outside the FD stencil.
Tensor64 away_from_zero(const Shape& s, Rng& rng) {
  Tensor64 t(s);
  for (auto& v : t.data()) {
    const double mag = rng.uniform(0.05, 1.0);
    v = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

}  // namespace

std::vector<OpCheck> gradcheck_ops(std::uint64_t seed, std::size_t instances) {
  const Rng root = Rng(seed).split("gradcheck-ops");
  std::vector<OpCheck> out;

  auto run = [&](const std::string& name, const std::function<Probe(Rng&)>& make) {
    OpCheck c;
    c.op = name;
    Rng rng = root.split(name);
    for (std::size_t k = 0; k < instances; ++k) {
      Rng inst = rng.split(k);
      Probe p = make(inst);
      merge(c.worst, check_probe(p, inst));
      ++c.instances;
    }
    out.push_back(c);
  };

  for (ConvAlgo algo : {ConvAlgo::Im2col, ConvAlgo::Direct}) {
    run(algo == ConvAlgo::Im2col ? "conv2d (im2col)" : "conv2d (direct)", [algo](Rng& r) {
      const std::size_t n = pick(r, 1, 2), c = pick(r, 1, 3), k = pick(r, 1, 4);
      const std::size_t h = pick(r, 3, 7), w = pick(r, 3, 7), stride = pick(r, 1, 2);
      const std::size_t ksz = r.uniform() < 0.75 ? 3 : 1;
      const Conv2dParams prm{stride, ksz == 3 ? std::size_t{1} : std::size_t{0}};
      Probe p;
      p.algo = algo;
      p.inputs = {random_tensor({n, c, h, w}, r), random_tensor({k, c, ksz, ksz}, r)};
      p.build = [prm](Tape<double>& t, const std::vector<Var>& v) {
        return t.conv2d(v[0], v[1], prm);
      };
      return p;
    });
  }
  for (BnMode mode : {BnMode::Train, BnMode::Eval}) {
    run(mode == BnMode::Train ? "batchnorm (train)" : "batchnorm (eval)", [mode](Rng& r) {
      const std::size_t n = pick(r, 2, 4), c = pick(r, 1, 4), h = pick(r, 1, 4), w = pick(r, 1, 4);
      Probe p;
      p.inputs = {random_tensor({n, c, h, w}, r), random_tensor({c}, r, 0.5, 1.5),
                  random_tensor({c}, r)};
      auto stats = std::make_shared<RunningStats<double>>(
          RunningStats<double>{random_tensor({c}, r), random_tensor({c}, r, 0.5, 2.0)});
      p.build = [mode, stats](Tape<double>& t, const std::vector<Var>& v) {
        RunningStats<double> copy = *stats;  // every evaluation sees the same stats
        return t.batchnorm(v[0], v[1], v[2], copy, mode);
      };
      return p;
    });
  }
  run("relu", [](Rng& r) {
    Probe p;
    p.inputs = {away_from_zero({pick(r, 1, 3), pick(r, 1, 3), pick(r, 1, 4), pick(r, 1, 4)}, r)};
    p.build = [](Tape<double>& t, const std::vector<Var>& v) { return t.relu(v[0]); };
    return p;
  });
  run("add", [](Rng& r) {
    const Shape s{pick(r, 1, 3), pick(r, 1, 3), pick(r, 1, 4), pick(r, 1, 4)};
    Probe p;
    p.inputs = {random_tensor(s, r), random_tensor(s, r)};
    p.build = [](Tape<double>& t, const std::vector<Var>& v) { return t.add(v[0], v[1]); };
    return p;
  });
  run("shortcut", [](Rng& r) {
    const std::size_t c = pick(r, 1, 4), stride = pick(r, 1, 2);
    const std::size_t out_c = c + 2 * pick(r, 0, 2);
    Probe p;
    p.inputs = {random_tensor({pick(r, 1, 3), c, pick(r, 2, 6), pick(r, 2, 6)}, r)};
    p.build = [out_c, stride](Tape<double>& t, const std::vector<Var>& v) {
      return t.shortcut(v[0], out_c, stride);
    };
    return p;
  });
  run("global_avg_pool", [](Rng& r) {
    Probe p;
    p.inputs = {random_tensor({pick(r, 1, 3), pick(r, 1, 4), pick(r, 1, 5), pick(r, 1, 5)}, r)};
    p.build = [](Tape<double>& t, const std::vector<Var>& v) { return t.global_avg_pool(v[0]); };
    return p;
  });
  run("dense", [](Rng& r) {
    const std::size_t n = pick(r, 1, 4), f = pick(r, 1, 6), o = pick(r, 1, 5);
    Probe p;
    p.inputs = {random_tensor({n, f}, r), random_tensor({o, f}, r), random_tensor({o}, r)};
    p.build = [](Tape<double>& t, const std::vector<Var>& v) { return t.dense(v[0], v[1], v[2]); };
    return p;
  });
  run("softmax_xent", [](Rng& r) {
    const std::size_t n = pick(r, 1, 5), k = pick(r, 2, 10);
    std::vector<std::int32_t> labels(n);
    for (auto& l : labels) l = static_cast<std::int32_t>(r.below(k));
    Probe p;
    p.scalar_output = true;
    p.inputs = {random_tensor({n, k}, r, -3.0, 3.0)};
    p.build = [labels](Tape<double>& t, const std::vector<Var>& v) {
      return t.softmax_xent(v[0], labels);
    };
    return p;
  });
  return out;
}

OpCheck gradcheck_network(std::uint64_t seed, std::size_t instances,
                          std::size_t coords_per_tensor) {
  OpCheck c;
  c.op = "depth-14 network";
  const Rng root = Rng(seed).split("gradcheck-net");
  const SkipKind kinds[] = {SkipKind::Full, SkipKind::Short, SkipKind::None};
  for (std::size_t k = 0; k < instances; ++k) {
    Rng rng = root.split(k);
    NetSpec spec = NetSpec::uniform(2, {4, 8, 8}, 5, 2, SkipKind::Full);
    for (auto& s : spec.skip_kinds) s = kinds[rng.below(3)];
    spec.short_span = rng.uniform() < 0.5 ? ShortSpan::First : ShortSpan::Second;
    spec.short_join = rng.uniform() < 0.5 ? JoinOrder::AddThenRelu : JoinOrder::ReluThenAdd;
    const NetGraph graph = build_net(spec, rng.next_u64());
    ParamStore64 params = graph.params().cast<double>();
    // nontrivial BN affine parameters
    for (auto& e : params.entries()) {
      if (e.name.ends_with(".gamma")) {
        for (auto& v : e.value.data()) v = rng.uniform(0.5, 1.5);
      } else if (e.name.ends_with(".beta") || e.name == "fc.bias") {
        for (auto& v : e.value.data()) v = rng.uniform(-0.5, 0.5);
      }
    }
    Tensor64 x = random_tensor({3, 2, 8, 8}, rng);
    std::vector<std::int32_t> labels{0, 3, 4};

    // returns the loss; fills `grads` (aligned with the store) when given
    auto run = [&](std::vector<Tensor64>* grads) {
      Tape<double> tape;
      auto f = forward(tape, graph, params, x, BnMode::Train);
      Var l = tape.softmax_xent(f.logits, labels);
      if (grads) {
        tape.backward(l);
        grads->clear();
        for (std::size_t i = 0; i < params.size(); ++i) {
          grads->push_back(f.param_vars[i].valid() ? tape.grad(f.param_vars[i]) : Tensor64());
        }
      }
      return tape.value(l)[0];
    };
    std::vector<Tensor64> analytic;
    run(&analytic);
    auto eval = [&] { return run(nullptr); };
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& e = params.entries()[i];
      if (!e.trainable) continue;
      const auto coords = sample_coords(e.value.size(), coords_per_tensor, rng);
      merge(c.worst, check_gradient(e.value, analytic[i], eval, coords));
    }
    ++c.instances;
  }
  return c;
}

}  // namespace deskip::testing
