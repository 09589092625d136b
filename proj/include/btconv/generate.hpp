#pragma once

#include <cstdint>

#include "btconv/spec_io.hpp"

namespace btconv {

struct GridworldOptions {
  std::size_t max_side = 6;    // grid is w x h with 2 <= w, h <= max_side
  std::size_t max_leaves = 5;  // action leaves
};

// Random metric gridworld with an action-only tree. Controllers move to a
// 4-neighbor or stay; DOAs are the largest ones derive_doa finds.
SpecDocument random_gridworld(std::uint64_t seed, const GridworldOptions& opts = {});

}  // namespace btconv
