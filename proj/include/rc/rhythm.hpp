#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rc/geometry.hpp"

namespace rc {

/// Preset segment travel times. t5[j] belongs to left lane n_s + 1 + j.
struct RhythmTiming {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  std::vector<double> t5;

  /// Travel time of one segment of the given class.
  double segment_time(const SegmentClass& seg, int n_s) const;
  double t5_of(int lane, int n_s) const;
};

/// Witness multiples for the five collision-freedom conditions:
///   (1) t1 == T
///   (2) t4 == (2 k0 + 1) t1
///   (3) 2 t2 + t3 == (2 k0' + 1) t1
///   (4) 2 t5[l] + t3 == (2 k0''[l] + 1) t1
///   (5) t5[i] - t5[j] == 2 k0'''[i][j] t1 for i < j
struct ConditionCheck {
  std::array<bool, 5> holds{};
  std::optional<long> k0;
  std::optional<long> k0p;
  std::vector<std::optional<long>> k0pp;
  std::vector<std::vector<std::optional<long>>> k0ppp;  // [i][j], i < j

  bool all() const { return holds[0] && holds[1] && holds[2] && holds[3] && holds[4]; }
};

/// Evaluates the five conditions against the physical minimum gap T.
ConditionCheck check_conditions(const RhythmTiming& timing, double min_gap, int n_l);

/// Segment lengths in meters. A length of 0 leaves the category
/// unconstrained by the speed band (it still gets a positive time).
struct SegmentLengths {
  double cat1 = 0.0;
  double cat2 = 0.0;
  double cat3 = 0.0;
  double cat4 = 0.0;
  std::vector<double> cat5;  // per left lane, ascending lane number

  bool operator==(const SegmentLengths&) const = default;
};

struct SpeedBand {
  double lo = 5.0;
  double hi = 10.0;
  bool operator==(const SpeedBand&) const = default;
};

/// Picks the smallest odd multiples of T1 that keep every implied segment
/// speed inside the band. T3 is fixed first (smallest feasible value), then
/// T2, T4 and the T5 values. Throws InfeasibleBand naming the nearest
/// reachable speed when no multiple fits.
RhythmTiming solve_travel_times(const IntersectionSpec& spec, const SegmentLengths& lengths,
                                const SpeedBand& band);

/// Timing from explicit multiples of T1 (used for hand-built layouts and
/// for constructing deliberately broken rhythms).
RhythmTiming timing_from_multiples(double t1, double m2, double m3, double m4,
                                   const std::vector<double>& m5);

struct LaneSchedule {
  LaneId lane;
  double offset = 0.0;  // in [0, period)
  double period = 0.0;
  bool schedulable = true;

  /// Smallest scheduled entry time >= t.
  double next_slot(double t) const;
};

/// Per-lane periodic entry times: offset + k * 2 T1.
struct EntrySchedule {
  double t1 = 0.0;
  std::vector<LaneSchedule> lanes;  // indexed like IntersectionSpec::index

  double period() const { return 2.0 * t1; }
  const LaneSchedule& at(const IntersectionSpec& spec, const LaneId& id) const {
    return lanes[spec.index(id)];
  }
};

EntrySchedule entry_schedule(const IntersectionSpec& spec, const RhythmTiming& timing);

/// Time after the entry point at which each crossing of a lane path is
/// reached (first crossing at 0).
std::vector<double> crossing_offsets(const IntersectionSpec& spec, const RhythmTiming& timing,
                                     const LaneId& lane);

struct PointAudit {
  ConflictPoint point;
  double min_headway = 0.0;          // closed-form route
  double min_headway_enumerated = 0.0;
  bool odd_multiple = false;         // every pair in the window
  bool routes_agree = false;         // closed form == propagated schedule
  double worst_a = 0.0;
  double worst_b = 0.0;
  bool pass = false;
};

struct AuditReport {
  double min_gap = 0.0;  // physical T the headways are compared to
  int k_window = 0;
  std::vector<PointAudit> points;  // active points only
  bool pass = false;

  const PointAudit* first_failure() const;
};

/// Arrival residue of each lane at a point from the closed-form
/// expressions (k = 0 terms), as {lane_a, lane_b}.
std::array<double, 2> closed_form_arrivals(const IntersectionSpec& spec, const RhythmTiming& timing,
                                           const ConflictPoint& p);

/// Checks every active conflict point over k in [-k_window, k_window].
AuditReport audit(const IntersectionSpec& spec, const RhythmTiming& timing, int k_window = 20);

std::string format_report(const AuditReport& report);

/// Number of lanes owning right of way at t = i * resolution. A lane owns it
/// over [entry, entry + occupancy) around each scheduled entry.
std::vector<int> row_profile(const EntrySchedule& schedule, double horizon, double resolution,
                             double occupancy);

/// Minimum corner distance between two perpendicular vehicles crossing one
/// point with time offset gap, sampled densely.
double geometric_oracle(const VehicleParams& v, double gap, std::size_t samples = 100000);

}  // namespace rc
