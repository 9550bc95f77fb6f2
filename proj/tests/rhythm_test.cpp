#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rc/errors.hpp"
#include "rc/rhythm.hpp"

using namespace rc;

namespace {

VehicleParams toy_vehicle() {
  VehicleParams v;
  v.length = 4.5;
  v.width = 1.5;
  v.min_gap = 1.5 / std::sqrt(2.0);
  v.v_max = 12.0;
  return v;
}

bool odd_multiple(double x, double unit) {
  const double q = x / unit;
  const long m = std::lround(q);
  return std::abs(x - static_cast<double>(m) * unit) <= 1e-9 && (m % 2 + 2) % 2 == 1;
}

// Smallest odd multiple of t1 whose implied speed lies in the band, by
// exhaustive search over k0.
std::optional<double> brute_force_odd(double len, double t1, double lo, double hi) {
  for (int k = 0; k <= 50; ++k) {
    const double t = (2 * k + 1) * t1;
    const double speed = len / t;
    if (speed >= lo - 1e-9 && speed <= hi + 1e-9) return t;
  }
  return std::nullopt;
}

TEST(Solve, CategoryFourAtTopSpeed) {
  const IntersectionSpec spec(1, 2, toy_vehicle());
  SegmentLengths len;
  len.cat4 = 7.5;
  const auto t = solve_travel_times(spec, len, {6.0, 12.0});
  EXPECT_NEAR(t.t1, 0.625, 1e-12);
  const auto expected = brute_force_odd(7.5, 0.625, 6.0, 12.0);
  ASSERT_TRUE(expected);
  EXPECT_NEAR(t.t4, *expected, 1e-12);
  EXPECT_NEAR(t.t4, 0.625, 1e-12);
  EXPECT_EQ(check_conditions(t, 0.625, 2).k0, 0);
}

TEST(Solve, NarrowBandIsInfeasible) {
  EXPECT_FALSE(brute_force_odd(10.0, 0.625, 11.9, 12.0));
  const IntersectionSpec spec(1, 2, toy_vehicle());
  SegmentLengths len;
  len.cat4 = 10.0;
  try {
    solve_travel_times(spec, len, {11.9, 12.0});
    FAIL() << "expected InfeasibleBand";
  } catch (const InfeasibleBand& e) {
    EXPECT_NE(std::string(e.what()).find("nearest reachable"), std::string::npos);
  }
}

TEST(Solve, RejectsBandAboveTopSpeed) {
  const IntersectionSpec spec(1, 1);
  EXPECT_THROW(solve_travel_times(spec, {}, {5.0, 11.0}), InvalidParameter);
  EXPECT_THROW(solve_travel_times(spec, {}, {6.0, 5.0}), InvalidParameter);
}

TEST(Solve, OutputsSatisfyConditionsAndBand) {
  std::mt19937_64 rng(7);
  // Windows of at least 2 T1 for every half-time keep each draw feasible.
  std::uniform_real_distribution<double> len_dist(5.0, 40.0);
  const SpeedBand band{2.0, 10.0};
  for (int n_s = 1; n_s <= 3; ++n_s) {
    for (int n_l = 0; n_l <= 3; ++n_l) {
      for (int rep = 0; rep < 10; ++rep) {
        const IntersectionSpec spec(n_s, n_l);
        SegmentLengths len;
        len.cat2 = len_dist(rng);
        len.cat3 = len_dist(rng);
        len.cat4 = len_dist(rng);
        for (int j = 0; j < n_l; ++j) len.cat5.push_back(len_dist(rng));
        // T5 must not increase with lane number, so neither may the lengths.
        std::sort(len.cat5.rbegin(), len.cat5.rend());
        const auto t = solve_travel_times(spec, len, band);
        const double T = min_gap_T(spec.vehicle());
        EXPECT_TRUE(check_conditions(t, T, n_l).all());
        auto in_band = [&](double l, double time) {
          return l / time >= band.lo - 1e-9 && l / time <= band.hi + 1e-9;
        };
        if (n_l >= 2) {
          EXPECT_TRUE(in_band(len.cat4, t.t4));
          EXPECT_NEAR(t.t4, *brute_force_odd(len.cat4, T, band.lo, band.hi), 1e-12);
        }
        if (n_l >= 1) {
          EXPECT_TRUE(in_band(len.cat2, t.t2));
          EXPECT_TRUE(in_band(len.cat3, t.t3));
          for (int j = 0; j < n_l; ++j) {
            EXPECT_TRUE(in_band(len.cat5[static_cast<std::size_t>(j)], t.t5[static_cast<std::size_t>(j)]));
          }
        }
      }
    }
  }
}

TEST(Solve, IncreasingLeftTurnTimesAreInfeasible) {
  // Disjoint T5 windows in ascending order cannot satisfy the
  // non-negative even differences between left lanes.
  const IntersectionSpec spec(1, 2);
  SegmentLengths len;
  len.cat5 = {6.0, 35.0};
  EXPECT_THROW(solve_travel_times(spec, len, {2.0, 10.0}), InfeasibleBand);
  len.cat5 = {35.0, 6.0};
  EXPECT_NO_THROW(solve_travel_times(spec, len, {2.0, 10.0}));
}

TEST(Solve, T3IsSmallestWhenUnconstrained) {
  const IntersectionSpec spec(2, 1);
  SegmentLengths len;
  len.cat3 = 12.0;
  const auto t = solve_travel_times(spec, len, {5.0, 10.0});
  EXPECT_NEAR(t.t3, 1.2, 1e-12);
}

TEST(Conditions, ToyTripleGivesThreeT1) {
  const auto t = timing_from_multiples(0.625, 1, 1, 1, {1});
  EXPECT_NEAR(2 * t.t2 + t.t3, 1.875, 1e-12);
  const auto c = check_conditions(t, 0.625, 1);
  EXPECT_TRUE(c.all());
  EXPECT_EQ(c.k0p, 1);
}

TEST(Conditions, EachMutationIsDetected) {
  const double T = 0.625;
  EXPECT_FALSE(check_conditions(timing_from_multiples(0.6, 1, 1, 1, {1, 1}), T, 2).holds[0]);
  EXPECT_FALSE(check_conditions(timing_from_multiples(T, 1, 1, 2, {1, 1}), T, 2).holds[1]);
  EXPECT_FALSE(check_conditions(timing_from_multiples(T, 1, 2, 1, {1.5, 1.5}), T, 2).holds[2]);
  EXPECT_FALSE(check_conditions(timing_from_multiples(T, 1, 1, 1, {1.5, 1}), T, 2).holds[3]);
  const auto c5 = check_conditions(timing_from_multiples(T, 1, 1, 1, {1, 2}), T, 2);
  EXPECT_TRUE(c5.holds[3]);
  EXPECT_FALSE(c5.holds[4]);
}

TEST(EntrySchedule, ToyOffsets) {
  const IntersectionSpec spec(2, 1, toy_vehicle());
  const auto timing = timing_from_multiples(0.625, 1, 1, 1, {1});
  const auto s = entry_schedule(spec, timing);
  EXPECT_NEAR(s.period(), 1.25, 1e-12);
  for (int leg = 0; leg < 4; ++leg) {
    EXPECT_NEAR(s.at(spec, {leg, 1}).offset, 0.625, 1e-12);
    EXPECT_NEAR(s.at(spec, {leg, 2}).offset, 0.0, 1e-12);
    const double raw = 0.625 + 2 * timing.t4 + timing.t2 + timing.t3;
    EXPECT_NEAR(s.at(spec, {leg, 3}).offset, std::fmod(raw, 1.25), 1e-12);
  }
}

TEST(EntrySchedule, SlotsArePeriodic) {
  const IntersectionSpec spec(3, 2);
  const auto timing = solve_travel_times(spec, {}, {5.0, 10.0});
  const auto s = entry_schedule(spec, timing);
  for (const auto& lane : s.lanes) {
    EXPECT_GE(lane.offset, 0.0);
    EXPECT_LT(lane.offset, s.period());
    double t = lane.next_slot(3.3);
    EXPECT_GE(t, 3.3 - 1e-9);
    EXPECT_LT(t, 3.3 + s.period());
    EXPECT_NEAR(lane.next_slot(t + 1e-6) - t, s.period(), 1e-9);
    EXPECT_NEAR(lane.next_slot(t), t, 1e-12);
  }
}

TEST(EntrySchedule, VirtualLanesUnschedulable) {
  const std::vector<LegLanes> legs{{3, 2}, {1, 1}, {3, 2}, {1, 1}};
  const auto spec = virtualize(legs);
  const auto s = entry_schedule(spec, solve_travel_times(spec, {}, {5.0, 10.0}));
  EXPECT_FALSE(s.at(spec, {1, 2}).schedulable);
  EXPECT_TRUE(s.at(spec, {1, 1}).schedulable);
}

class AuditLayouts : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(AuditLayouts, SolverTimingPasses) {
  const auto [n_s, n_l] = GetParam();
  const IntersectionSpec spec(n_s, n_l);
  SegmentLengths len;
  len.cat2 = 9.0;
  len.cat3 = 14.0;
  len.cat4 = 7.0;
  for (int j = 0; j < n_l; ++j) len.cat5.push_back(6.0 + 5.0 * j);
  const auto timing = solve_travel_times(spec, len, {4.0, 10.0});
  const auto report = audit(spec, timing, 20);
  EXPECT_TRUE(report.pass) << format_report(report);
  EXPECT_EQ(report.points.size(), static_cast<std::size_t>(4 * (n_s + n_l) * (n_s + n_l)));
  for (const auto& p : report.points) {
    EXPECT_TRUE(p.odd_multiple);
    EXPECT_TRUE(p.routes_agree);
    EXPECT_GE(p.min_headway, timing.t1 - 1e-9);
    EXPECT_TRUE(odd_multiple(p.worst_a - p.worst_b, timing.t1));
    if (p.point.type == ConflictType::C) {
      EXPECT_NEAR(p.min_headway, timing.t1, 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Small, AuditLayouts,
                         ::testing::Values(std::pair{1, 0}, std::pair{1, 1}, std::pair{1, 2},
                                           std::pair{2, 0}, std::pair{2, 1}, std::pair{2, 2},
                                           std::pair{3, 0}, std::pair{3, 1}, std::pair{3, 2}));

TEST(Audit, EvenT4FailsOnLeftLeftPoint) {
  const IntersectionSpec spec(3, 2);
  const double T = min_gap_T(spec.vehicle());
  const auto report = audit(spec, timing_from_multiples(T, 1, 1, 2, {1, 1}), 20);
  EXPECT_FALSE(report.pass);
  ASSERT_NE(report.first_failure(), nullptr);
  for (const auto& p : report.points) {
    if (!p.pass) {
      EXPECT_EQ(p.point.type, ConflictType::D);
    }
  }
  EXPECT_NE(format_report(report).find("counterexample"), std::string::npos);
}

TEST(Audit, EveryConditionMutationFails) {
  const IntersectionSpec spec(2, 2);
  const double T = min_gap_T(spec.vehicle());
  ASSERT_TRUE(audit(spec, timing_from_multiples(T, 1, 1, 1, {1, 1})).pass);
  EXPECT_FALSE(audit(spec, timing_from_multiples(0.9 * T, 1, 1, 1, {1, 1})).pass);
  EXPECT_FALSE(audit(spec, timing_from_multiples(T, 1, 1, 2, {1, 1})).pass);
  EXPECT_FALSE(audit(spec, timing_from_multiples(T, 1.5, 1, 1, {1, 1})).pass);
  EXPECT_FALSE(audit(spec, timing_from_multiples(T, 1, 1, 1, {1.5, 1})).pass);
  EXPECT_FALSE(audit(spec, timing_from_multiples(T, 1, 1, 1, {1, 2})).pass);
}

TEST(Audit, NoLeftLanesPassesForAnyOtherTimes) {
  const IntersectionSpec spec(3, 0);
  const double T = min_gap_T(spec.vehicle());
  const auto report = audit(spec, timing_from_multiples(T, 2.2, 0.4, 6, {}), 10);
  EXPECT_TRUE(report.pass);
  for (const auto& p : report.points) EXPECT_EQ(p.point.type, ConflictType::A);
}

TEST(Audit, DisabledLaneSkipsItsPoints) {
  IntersectionSpec spec(2, 1);
  spec.set_disabled({0, 3});
  const auto report = audit(spec, solve_travel_times(spec, {}, {5.0, 10.0}), 5);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.points.size(), 30u);  // 36 total, 6 touch the lane
}

TEST(Audit, RejectsTinyWindow) {
  const IntersectionSpec spec(1, 0);
  EXPECT_THROW(audit(spec, timing_from_multiples(min_gap_T(spec.vehicle()), 1, 1, 1, {}), 1),
               InvalidParameter);
}

TEST(RowProfile, ToyBlankArea) {
  const IntersectionSpec spec(2, 1, toy_vehicle());
  auto single = spec;
  for (const auto& id : spec.lanes())
    if (!(id == LaneId{0, 1})) single.set_disabled(id);
  const auto s = entry_schedule(single, timing_from_multiples(0.625, 1, 1, 1, {1}));
  const double res = 0.625 / 100;
  const auto profile = row_profile(s, 10.0, res, 0.625);
  // Longest run of zeros between bars.
  int run = 0;
  int best = 0;
  for (int c : profile) {
    EXPECT_LE(c, 1);
    run = c == 0 ? run + 1 : 0;
    best = std::max(best, run);
  }
  EXPECT_NEAR(best * res, 0.625, res + 1e-12);
}

TEST(RowProfile, SingleLaneAlternates) {
  IntersectionSpec spec(1, 0);
  for (const auto& id : spec.lanes())
    if (id.leg != 0) spec.set_disabled(id);
  const double T = min_gap_T(spec.vehicle());
  const auto s = entry_schedule(spec, timing_from_multiples(T, 1, 1, 1, {}));
  const auto profile = row_profile(s, 20 * T, T / 4, T);
  // Offset is T for lane 1: samples in [T, 2T) are 1, [0, T) are 0.
  for (std::size_t i = 0; i < profile.size(); ++i) {
    EXPECT_EQ(profile[i], (i / 4) % 2 == 1 ? 1 : 0) << i;
  }
}

TEST(RowProfile, AllDisabledIsZero) {
  IntersectionSpec spec(2, 2);
  for (const auto& id : spec.lanes()) spec.set_disabled(id);
  const auto s = entry_schedule(spec, solve_travel_times(spec, {}, {5.0, 10.0}));
  for (int c : row_profile(s, 30.0, 0.05, 0.45)) EXPECT_EQ(c, 0);
}

TEST(RowProfile, RejectsCoarseResolution) {
  const IntersectionSpec spec(1, 0);
  const auto s = entry_schedule(spec, solve_travel_times(spec, {}, {5.0, 10.0}));
  EXPECT_THROW(row_profile(s, 10.0, s.t1 / 2, 0.1), InvalidParameter);
}

double closed_form_distance(const VehicleParams& v, double gap) {
  return std::abs(v.v_max * gap - v.length - v.width) / std::sqrt(2.0);
}

TEST(GeometricOracle, EqualityAtMinimumGap) {
  const VehicleParams v;
  const double T = min_gap_T(v);
  EXPECT_NEAR(geometric_oracle(v, T), v.min_gap, 1e-4);
}

TEST(GeometricOracle, DoubleGap) {
  const VehicleParams v;
  const double T = min_gap_T(v);
  const double expected = (v.length + v.width) / std::sqrt(2.0) + 2 * v.min_gap;
  EXPECT_NEAR(closed_form_distance(v, 2 * T), expected, 1e-12);
  EXPECT_NEAR(geometric_oracle(v, 2 * T), expected, 1e-4);
}

TEST(GeometricOracle, TooCloseCollides) {
  const VehicleParams v;
  const double T = min_gap_T(v);
  EXPECT_EQ(geometric_oracle(v, 0.0), 0.0);
  EXPECT_LT(geometric_oracle(v, 0.9 * T), v.min_gap);
}

TEST(GeometricOracle, ConvergesToClosedForm) {
  const VehicleParams v = toy_vehicle();
  // Bodies clear the point from (L + w) / v_max = 0.5 s on.
  for (double gap : {0.55, 0.7, 0.8, 1.0, 1.5, 3.0}) {
    EXPECT_NEAR(geometric_oracle(v, gap, 200000), closed_form_distance(v, gap), 1e-4) << gap;
  }
}

TEST(GeometricOracle, AuditPassImpliesSafeSpacing) {
  const IntersectionSpec spec(2, 2);
  const auto report = audit(spec, solve_travel_times(spec, {}, {5.0, 10.0}), 10);
  ASSERT_TRUE(report.pass);
  double worst = 1e9;
  for (const auto& p : report.points) worst = std::min(worst, p.min_headway);
  EXPECT_GE(geometric_oracle(spec.vehicle(), worst), spec.vehicle().min_gap - 1e-6);
}

}  // namespace
