// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// Finite-difference checks of every differentiable op and of a whole
// network, recorded through the tape in 64-bit mode. Shared by the unit
// tests and the acceptance binary.

#pragma once

#include <string>
#include <vector>

#include "fd.hpp"

namespace deskip::testing {

struct OpCheck {
  std::string op;
  std::size_t instances = 0;
  FdReport worst;
  bool passed() const { return worst.max_rel_err < kFdRelTol; }
};

/// One entry per op, each over `instances` random shapes.
std::vector<OpCheck> gradcheck_ops(std::uint64_t seed, std::size_t instances = 20);

/// Depth-14 network (n = 2), random skip kinds per block, loss = mean
/// cross-entropy. Checks the input and a sample of every parameter tensor.
OpCheck gradcheck_network(std::uint64_t seed, std::size_t instances = 20,
                          std::size_t coords_per_tensor = 6);

}  // namespace deskip::testing
