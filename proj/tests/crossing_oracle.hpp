#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "rc/geometry.hpp"

namespace rc::testing {

/// Crossings found by intersecting explicit 2-D lane paths: straight
/// through lanes and L-shaped left-turn lanes on an integer grid.
struct GridCrossings {
  std::map<LaneId, std::vector<LaneId>> order;  // crossings in travel order
  std::set<std::pair<LaneId, LaneId>> pairs;    // unordered, stored sorted
};

GridCrossings grid_crossings(int n_s, int n_l);

}  // namespace rc::testing
