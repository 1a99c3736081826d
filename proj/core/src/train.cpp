// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "deskip/optim.hpp"
#include "deskip/rng.hpp"
#include "deskip/tape.hpp"

namespace deskip {

double TrainConfig::lr_at(std::size_t epoch) const {
  double out = lr;
  for (const auto& s : lr_steps) {
    if (epoch >= s.epoch) out = s.lr;
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("train: batch_size must be >= 2 (batch norm)");
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train: momentum must lie in [0, 1)");
  if (weight_decay < 0.0) throw ConfigError("train: weight_decay must be >= 0");
  if (eval_every == 0) throw ConfigError("train: eval_every must be >= 1");
  if (eval_batch_size == 0) throw ConfigError("train: eval_batch_size must be >= 1");
  for (std::size_t i = 0; i < lr_steps.size(); ++i) {
    if (!(lr_steps[i].lr > 0.0)) throw ConfigError("train: lr_steps entries must have lr > 0");
    if (i > 0 && lr_steps[i].epoch <= lr_steps[i - 1].epoch) {
      throw ConfigError("train: lr_steps epochs must be strictly increasing");
    }
  }
}

std::size_t RunRecord::fork_join_pairs() const {
  std::size_t n = 0;
  for (SkipKind k : skip_mask)
    if (k != SkipKind::None) ++n;
  return n;
}

EvalResult evaluate(const NetGraph& graph, const Dataset& data, Split split,
                    std::size_t batch_size) {
  const auto& d = data.split(split);
  EvalResult r;
  if (d.size() == 0) return r;
  ParamStore params = graph.params();
  double loss = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < d.size(); start += batch_size) {
    const std::size_t end = std::min(d.size(), start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    Tape<float> tape;
    auto f = forward(tape, graph, params, data.batch_images(split, idx), BnMode::Eval);
    const auto labels = data.batch_labels(split, idx);
    auto x = softmax_xent(tape.value(f.logits), labels);
    loss += static_cast<double>(x.loss) * static_cast<double>(idx.size());
    correct += x.correct;
  }
  r.loss = loss / static_cast<double>(d.size());
  r.accuracy = static_cast<double>(correct) / static_cast<double>(d.size());
  return r;
}

TrainResult train(NetGraph graph, const Dataset& data, const TrainConfig& cfg,
                  std::uint64_t stream, std::string label) {
  cfg.validate();
  data.validate();
  if (data.train.size() < 2) throw DataError("train: need at least 2 training samples");
  if (data.num_classes != graph.spec().num_classes) {
    throw ConfigError("train: dataset has " + std::to_string(data.num_classes) +
                      " classes, network predicts " +
                      std::to_string(graph.spec().num_classes));
  }
  const auto t0 = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.label = std::move(label);
  rec.skip_mask = graph.spec().skip_kinds;
  Checkpoint best = Checkpoint::from_graph(graph);
  rec.entry_checksum = best.checksum();

  const bool has_val = data.val.size() > 0;
  const Split select_split = has_val ? Split::Val : Split::Train;
  {
    EpochMetrics m;
    m.epoch = 0;
    m.lr = cfg.lr_at(0);
    const auto e = evaluate(graph, data, select_split, cfg.eval_batch_size);
    if (has_val) {
      m.val_loss = e.loss;
      m.val_accuracy = e.accuracy;
    } else {
      m.train_loss = e.loss;
      m.train_accuracy = e.accuracy;
    }
    rec.epochs.push_back(m);
    rec.best_epoch = 0;
    rec.best_val_accuracy = e.accuracy;
  }

  const Rng root = Rng(cfg.seed).split("train").split(stream);
  SgdState<float> opt;
  const std::size_t n = data.train.size();
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> idx;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = cfg.lr_at(epoch - 1);
    const SgdOptions sgd{lr, cfg.momentum, cfg.weight_decay};
    std::iota(order.begin(), order.end(), 0);
    Rng rng = root.split(epoch);
    rng.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      if (end - start < 2) break;  // batch norm needs two samples
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                 order.begin() + static_cast<std::ptrdiff_t>(end));
      Tape<float> tape;
      auto f = forward(tape, graph, graph.params(), data.batch_images(Split::Train, idx),
                       BnMode::Train);
      const auto labels = data.batch_labels(Split::Train, idx);
      auto x = softmax_xent(tape.value(f.logits), labels);
      if (!std::isfinite(x.loss)) {
        rec.diverged = true;
        rec.diagnostic = "non-finite training loss at epoch " + std::to_string(epoch) +
                         ", batch starting at sample " + std::to_string(start) +
                         " (lr " + std::to_string(lr) + ")";
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        throw TrainingDiverged(rec.diagnostic, rec);
      }
      tape.backward(f.logits, std::move(x.dlogits));
      std::vector<const Tensor*> grads(f.param_vars.size(), nullptr);
      for (std::size_t i = 0; i < grads.size(); ++i)
        if (f.param_vars[i].valid()) grads[i] = &tape.grad(f.param_vars[i]);
      sgd_step(graph.params(), grads, opt, sgd);
      loss_sum += static_cast<double>(x.loss) * static_cast<double>(idx.size());
      correct += x.correct;
      seen += idx.size();
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.train_loss = loss_sum / static_cast<double>(seen);
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    const bool eval_now = epoch % cfg.eval_every == 0 || epoch == cfg.epochs;
    if (eval_now) {
      const auto e = evaluate(graph, data, select_split, cfg.eval_batch_size);
      if (has_val) {
        m.val_loss = e.loss;
        m.val_accuracy = e.accuracy;
      }
      if (e.accuracy > rec.best_val_accuracy) {
        rec.best_val_accuracy = e.accuracy;
        rec.best_epoch = epoch;
        best = Checkpoint::from_graph(graph);
      }
    }
    rec.epochs.push_back(m);
  }

  rec.checkpoint_checksum = best.checksum();
  if (data.test.size() > 0) {
    const NetGraph best_graph = transfer_weights(best, graph);
    const auto e = evaluate(best_graph, data, Split::Test, cfg.eval_batch_size);
    rec.test_loss = e.loss;
    rec.test_accuracy = e.accuracy;
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(best), std::move(rec)};
}

}  // namespace deskip
