#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "crossing_oracle.hpp"
#include "rc/errors.hpp"
#include "rc/geometry.hpp"

using namespace rc;

namespace {

VehicleParams toy_vehicle() {
  // L + w + sqrt(2) delta = 7.5 m at 12 m/s.
  VehicleParams v;
  v.length = 4.5;
  v.width = 1.5;
  v.min_gap = 1.5 / std::sqrt(2.0);
  v.v_max = 12.0;
  return v;
}

TEST(MinGap, DefaultVehicle) {
  EXPECT_NEAR(min_gap_T(VehicleParams{}), 0.79142135623730951, 1e-15);
}

TEST(MinGap, ToyExampleGivesQuarterPeriod) {
  EXPECT_NEAR(min_gap_T(toy_vehicle()), 0.625, 1e-12);
}

TEST(MinGap, RejectsNonPositive) {
  VehicleParams v;
  v.length = 0;
  v.width = 0;
  v.min_gap = 0;
  EXPECT_THROW(min_gap_T(v), InvalidParameter);
  VehicleParams w;
  w.v_max = -1;
  EXPECT_THROW(min_gap_T(w), InvalidParameter);
}

TEST(Virtualize, ThreeTwoOneOneLayout) {
  const std::vector<LegLanes> legs{{3, 2}, {1, 1}, {3, 2}, {1, 1}};
  const auto spec = virtualize(legs);
  EXPECT_EQ(spec.through_lanes(), 3);
  EXPECT_EQ(spec.left_lanes(), 2);
  for (int leg : {0, 2}) {
    for (int lane = 1; lane <= 5; ++lane) EXPECT_FALSE(spec.is_virtual({leg, lane}));
  }
  for (int leg : {1, 3}) {
    EXPECT_FALSE(spec.is_virtual({leg, 1}));
    EXPECT_TRUE(spec.is_virtual({leg, 2}));
    EXPECT_TRUE(spec.is_virtual({leg, 3}));
    EXPECT_FALSE(spec.is_virtual({leg, 4}));
    EXPECT_TRUE(spec.is_virtual({leg, 5}));
  }
  EXPECT_EQ(std::count(spec.virtual_mask().begin(), spec.virtual_mask().end(), true), 6);
}

TEST(Virtualize, SymmetricIsIdentity) {
  const std::vector<LegLanes> legs(4, LegLanes{2, 2});
  const auto spec = virtualize(legs);
  EXPECT_EQ(spec, IntersectionSpec(2, 2));
  EXPECT_EQ(std::count(spec.virtual_mask().begin(), spec.virtual_mask().end(), true), 0);
}

TEST(Virtualize, NoLeftLanesMeansThroughCrossingsOnly) {
  const std::vector<LegLanes> legs(4, LegLanes{2, 0});
  const auto points = conflict_points(virtualize(legs));
  EXPECT_EQ(points.size(), 4u * 2 * 2);
  for (const auto& p : points) EXPECT_EQ(p.type, ConflictType::A);
}

TEST(Virtualize, RejectsBadCounts) {
  const std::vector<LegLanes> bad{{0, 1}, {1, 1}, {1, 1}, {1, 1}};
  EXPECT_THROW(virtualize(bad), InvalidParameter);
  const std::vector<LegLanes> three{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_THROW(virtualize(three), InvalidParameter);
}

TEST(ConflictPoints, TypeCountsTwoThroughOneLeft) {
  const auto points = conflict_points(IntersectionSpec(2, 1));
  std::array<int, 4> count{};
  for (const auto& p : points) ++count[static_cast<std::size_t>(p.type)];
  EXPECT_EQ(count[0], 16);
  EXPECT_EQ(count[1], 8);
  EXPECT_EQ(count[2], 8);
  EXPECT_EQ(count[3], 4);
}

TEST(ConflictPoints, SingleLaneLegsOnlyTypeA) {
  const auto points = conflict_points(IntersectionSpec(1, 0));
  ASSERT_EQ(points.size(), 4u);
  for (const auto& p : points) EXPECT_EQ(p.type, ConflictType::A);
}

TEST(ConflictPoints, DisabledLaneMasksOnlyItsPoints) {
  IntersectionSpec spec(2, 1);
  const auto before = conflict_points(spec);
  const LaneId off{1, 2};
  spec.set_disabled(off);
  const auto after = conflict_points(spec);
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    EXPECT_EQ(after[i].active, !after[i].involves(off));
    EXPECT_EQ(before[i].lane_a, after[i].lane_a);
    EXPECT_EQ(before[i].pos_b, after[i].pos_b);
  }
}

TEST(ConflictPoints, SwapIdentityAndNoDuplicates) {
  for (int n_s = 1; n_s <= 3; ++n_s) {
    for (int n_l = 0; n_l <= 2; ++n_l) {
      const auto points = conflict_points(IntersectionSpec(n_s, n_l));
      std::set<std::pair<LaneId, LaneId>> seen;
      for (const auto& p : points) {
        EXPECT_TRUE(seen.insert(std::minmax(p.lane_a, p.lane_b)).second);
        const auto fwd = find_point(points, p.lane_a, p.lane_b);
        const auto rev = find_point(points, p.lane_b, p.lane_a);
        ASSERT_TRUE(fwd && rev);
        EXPECT_EQ(fwd->id, rev->id);
      }
      EXPECT_EQ(points.size(), static_cast<std::size_t>(4 * (n_s + n_l) * (n_s + n_l)));
    }
  }
}

TEST(ConflictPoints, InactiveLanesNeverInActivePoints) {
  const std::vector<LegLanes> legs{{3, 2}, {1, 1}, {3, 2}, {1, 1}};
  auto spec = virtualize(legs);
  spec.set_disabled({0, 4});
  for (const auto& p : conflict_points(spec)) {
    if (!p.active) continue;
    EXPECT_TRUE(spec.is_active(p.lane_a));
    EXPECT_TRUE(spec.is_active(p.lane_b));
  }
}

TEST(LanePath, PositionsMatchPaths) {
  const IntersectionSpec spec(3, 2);
  for (const auto& p : conflict_points(spec)) {
    const auto pa = lane_path(spec, p.lane_a);
    const auto pb = lane_path(spec, p.lane_b);
    EXPECT_EQ(pa.crossings.at(static_cast<std::size_t>(p.pos_a)), p.lane_b);
    EXPECT_EQ(pb.crossings.at(static_cast<std::size_t>(p.pos_b)), p.lane_a);
  }
}

TEST(LanePath, SegmentCategories) {
  const IntersectionSpec spec(2, 2);
  const auto through = lane_path(spec, {0, 1});
  std::vector<int> cats;
  for (const auto& s : through.segments) cats.push_back(s.category);
  EXPECT_EQ(cats, (std::vector<int>{1, 2, 4, 3, 4, 2, 1}));

  const auto left = lane_path(spec, {0, 4});
  cats.clear();
  for (const auto& s : left.segments) cats.push_back(s.category);
  EXPECT_EQ(cats, (std::vector<int>{1, 5, 1, 1, 1, 5, 1}));
  EXPECT_EQ(left.segments[1].lane, 4);
  EXPECT_FALSE(left.segments[0].lane.has_value());
}

// The timing topology must coincide with the crossings of explicit straight
// and L-shaped lane paths, both in which pairs cross and in travel order.
class GridOracle : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(GridOracle, TopologyMatchesPlanarCrossings) {
  const auto [n_s, n_l] = GetParam();
  const IntersectionSpec spec(n_s, n_l);
  const auto oracle = rc::testing::grid_crossings(n_s, n_l);

  std::set<std::pair<LaneId, LaneId>> ours;
  std::array<int, 4> per_type{};
  for (const auto& p : conflict_points(spec)) {
    ours.insert(std::minmax(p.lane_a, p.lane_b));
    ++per_type[static_cast<std::size_t>(p.type)];
  }
  EXPECT_EQ(ours, oracle.pairs);
  EXPECT_EQ(per_type[0], 4 * n_s * n_s);
  EXPECT_EQ(per_type[1], 4 * n_s * n_l);
  EXPECT_EQ(per_type[2], 4 * n_s * n_l);
  EXPECT_EQ(per_type[3], 4 * n_l * n_l);

  for (const auto& id : spec.lanes()) {
    EXPECT_EQ(lane_path(spec, id).crossings, oracle.order.at(id)) << to_string(id);
  }
}

INSTANTIATE_TEST_SUITE_P(AllSmallLayouts, GridOracle,
                         ::testing::Values(std::pair{1, 0}, std::pair{1, 1}, std::pair{1, 2},
                                           std::pair{2, 0}, std::pair{2, 1}, std::pair{2, 2},
                                           std::pair{3, 0}, std::pair{3, 1}, std::pair{3, 2}));

}  // namespace
