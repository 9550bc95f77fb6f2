#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rc {

/// Time tolerance for every timing comparison (seconds).
inline constexpr double kEpsTime = 1e-9;
/// Distance tolerance for every spacing comparison (meters).
inline constexpr double kEpsDist = 1e-6;

inline constexpr int kLegs = 4;

struct VehicleParams {
  double length = 4.5;   // L, m
  double width = 2.0;    // w, m
  double min_gap = 1.0;  // delta, m
  double v_max = 10.0;   // m/s
  double a_max = 3.0;    // m/s^2

  void validate() const;
  bool operator==(const VehicleParams&) const = default;
};

/// Minimum safe time gap between two conflicting crossings at a shared
/// point: (L + w + sqrt(2) delta) / v_max.
double min_gap_T(const VehicleParams& v);

/// Lanes on one leg are numbered 1..n_s (through, curb side first) and
/// n_s+1..n_s+n_l (left turn, towards the center line).
struct LaneId {
  int leg = 0;
  int lane = 1;

  auto operator<=>(const LaneId&) const = default;
};

std::string to_string(const LaneId& id);

struct LegLanes {
  int through = 1;
  int left = 0;
  bool operator==(const LegLanes&) const = default;
};

enum class LaneKind { Through, Left };

/// Symmetric four-leg layout with per-lane virtual and disabled flags.
class IntersectionSpec {
 public:
  IntersectionSpec() = default;
  IntersectionSpec(int n_s, int n_l, VehicleParams vehicle = {});

  int through_lanes() const { return n_s_; }
  int left_lanes() const { return n_l_; }
  int lanes_per_leg() const { return n_s_ + n_l_; }
  int lane_count() const { return kLegs * lanes_per_leg(); }

  const VehicleParams& vehicle() const { return vehicle_; }
  VehicleParams& vehicle() { return vehicle_; }

  LaneKind kind(int lane) const { return lane <= n_s_ ? LaneKind::Through : LaneKind::Left; }
  bool contains(const LaneId& id) const;
  std::size_t index(const LaneId& id) const;
  LaneId lane_at(std::size_t index) const;

  bool is_virtual(const LaneId& id) const { return virtual_[index(id)]; }
  bool is_disabled(const LaneId& id) const { return disabled_[index(id)]; }
  /// Carries traffic: neither virtual nor disabled.
  bool is_active(const LaneId& id) const { return !is_virtual(id) && !is_disabled(id); }

  void set_virtual(const LaneId& id, bool v = true) { virtual_[index(id)] = v; }
  void set_disabled(const LaneId& id, bool d = true) { disabled_[index(id)] = d; }

  const std::vector<bool>& virtual_mask() const { return virtual_; }
  const std::vector<bool>& disabled_mask() const { return disabled_; }

  std::vector<LaneId> lanes() const;

  bool operator==(const IntersectionSpec&) const = default;

 private:
  int n_s_ = 1;
  int n_l_ = 0;
  std::vector<bool> virtual_;
  std::vector<bool> disabled_;
  VehicleParams vehicle_;
};

/// Pads an asymmetric layout with virtual lanes so every leg has the
/// maximum through and left counts. Real lanes keep their ordinal within
/// their group (through lane k stays k, the j-th left lane becomes n_s + j).
IntersectionSpec virtualize(std::span<const LegLanes> legs, VehicleParams vehicle = {});

/// Segment categories 1..5 between consecutive conflict points on a path.
struct SegmentClass {
  int category = 1;
  std::optional<int> lane;  // left lane number, category 5 only

  bool operator==(const SegmentClass&) const = default;
};

/// Ordered crossings of one lane path and the segment between each pair.
struct LanePath {
  LaneId lane;
  std::vector<LaneId> crossings;
  std::vector<SegmentClass> segments;  // size crossings.size() - 1
};

/// Timing topology of one lane path. A through lane of leg a crosses, in
/// order: through lanes 1..n_s of leg a-1, the left lanes of leg a+2
/// (ascending), the left lanes of leg a+1 (descending), through lanes
/// n_s..1 of leg a+1. A left lane of leg b crosses through lanes 1..n_s
/// of leg b-1, the left lanes of leg b+1 (descending), the left lanes of
/// leg b-1 (ascending), through lanes n_s..1 of leg b+2.
LanePath lane_path(const IntersectionSpec& spec, const LaneId& lane);

enum class ConflictType { A, B, C, D };

char to_char(ConflictType t);

/// A crossing of two lane paths. lane_a/lane_b follow the orientation of
/// the closed-form arrival expressions: A (through a, through of leg a-1),
/// B (through a, left of leg a+2), C (through a, left of leg a+1),
/// D (left b, left of leg b+1). pos_a/pos_b index the crossing on each path.
struct ConflictPoint {
  int id = 0;
  LaneId lane_a;
  LaneId lane_b;
  ConflictType type = ConflictType::A;
  int pos_a = 0;
  int pos_b = 0;
  bool active = true;

  bool involves(const LaneId& l) const { return lane_a == l || lane_b == l; }
};

std::vector<ConflictPoint> conflict_points(const IntersectionSpec& spec);

/// Looks up the point shared by two lanes in either order.
std::optional<ConflictPoint> find_point(std::span<const ConflictPoint> points, const LaneId& x,
                                        const LaneId& y);

inline int wrap_leg(int leg) { return ((leg % kLegs) + kLegs) % kLegs; }

}  // namespace rc
