// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "deskip/distill.hpp"

namespace deskip {
namespace {

TEST(Schedule, NineInGroupsOfThree) {
  const RemovalSchedule s{9, 3};
  EXPECT_EQ(s.stages(), 3u);
  EXPECT_EQ(s.removed_at(1), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(s.removed_at(2), (std::vector<std::size_t>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(s.removed_at(3), (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

// Brute force: simulate removing groups one stage at a time.
TEST(Schedule, MatchesStepwiseRemovalForAllSmallSchedules) {
  for (std::size_t total = 1; total <= 12; ++total) {
    for (std::size_t g = 1; g <= total; ++g) {
      const RemovalSchedule s{total, g};
      std::vector<bool> removed(total, false);
      std::size_t stage = 0, next = 0;
      EXPECT_EQ(s.mask(0), removed);
      while (next < total) {
        ++stage;
        for (std::size_t i = 0; i < g && next < total; ++i) removed[next++] = true;
        ASSERT_EQ(s.mask(stage), removed) << total << "/" << g << " stage " << stage;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < total; ++i)
          if (removed[i]) idx.push_back(i + 1);
        ASSERT_EQ(s.removed_at(stage), idx);
      }
      EXPECT_EQ(s.stages(), stage) << total << "/" << g;
    }
  }
}

TEST(Schedule, Validation) {
  EXPECT_THROW((RemovalSchedule{0, 1}.validate()), ConfigError);
  EXPECT_THROW((RemovalSchedule{3, 0}.validate()), ConfigError);
  EXPECT_THROW((RemovalSchedule{3, 4}.validate()), ConfigError);
  EXPECT_NO_THROW((RemovalSchedule{3, 3}.validate()));
}

}  // namespace
}  // namespace deskip
