#pragma once

#include <vector>

#include "rc/geometry.hpp"
#include "rc/rhythm.hpp"

namespace rc {

/// Upstream buffer where vehicles slow down to meet their entry slot.
/// Positions run from 0 (zone entry) to length (conflict zone entry).
struct AdjustmentZone {
  double length = 100.0;

  /// The full decelerate-accelerate ramp between v_max and v_q must fit.
  void validate(const VehicleParams& v) const;
  bool operator==(const AdjustmentZone&) const = default;
};

/// Queue crawl speed (L + delta) / (2 T1).
double cruise_speed_vq(const VehicleParams& v);

/// Entry-time shift applied when a follower decelerates for less time than
/// its predecessor: (L + sqrt(2) delta + 2 w) / (v_max - v_q).
double follower_shift(const VehicleParams& v);

enum class CurveShape { Free, Triangular, Plateau };

const char* to_string(CurveShape s);

struct DeltaT {
  double dt = 0.0;    // te - ts
  double v_low = 0.0; // lowest speed reached
  CurveShape shape = CurveShape::Free;
};

/// Duration of the slow-down that turns a free-flow arrival at t0 + s/v_max
/// into an arrival at target. Triangular when the dip stays above v_q,
/// otherwise a plateau at v_q.
DeltaT solve_delta_t(double t0, double target, const AdjustmentZone& zone, const VehicleParams& v);

/// Cruise at v_max until ts, brake at a_max, optionally hold v_low,
/// accelerate back to v_max at te, then cruise to the conflict zone.
struct SpeedCurve {
  double t0 = 0.0;
  double ts = 0.0;
  double te = 0.0;
  double target = 0.0;
  double v_max = 0.0;
  double v_low = 0.0;
  double a_max = 0.0;
  double zone_length = 0.0;
  CurveShape shape = CurveShape::Free;

  double delta_t() const { return te - ts; }
  /// Defined for all t; outside [t0, target] the vehicle moves at v_max.
  double position(double t) const;
  double speed(double t) const;
  double accel(double t) const;
  /// Times where the acceleration changes.
  std::vector<double> breakpoints() const;
};

/// Curve with the slow-down ending at te. Throws ZoneTooShort when the
/// slow-down would have to start before t0 or end after target.
SpeedCurve make_curve(double t0, double target, double te, const AdjustmentZone& zone,
                      const VehicleParams& v);

/// Smallest bumper gap (lead position - follower position - L) over the
/// time both are in the zone. Evaluated at every breakpoint, every interior
/// extremum, and on a grid of the given step.
double spacing_check(const SpeedCurve& lead, const SpeedCurve& follow, const VehicleParams& v,
                     double step = 1e-2);

/// Picks the entry slot and slow-down timing for a vehicle reaching the zone
/// at t0 behind prev (nullptr for an empty lane). The slot is the earliest
/// one at or after free-flow arrival and after prev's slot; when spacing to
/// prev fails the end of the slow-down is moved per the follower rule and,
/// if that is not realizable, the slot advances. Throws ZoneOverflow after
/// max_advances slot advances.
SpeedCurve assign_curve(double t0, const SpeedCurve* prev, const LaneSchedule& lane,
                        const AdjustmentZone& zone, const VehicleParams& v, int max_advances = 1000);

}  // namespace rc
