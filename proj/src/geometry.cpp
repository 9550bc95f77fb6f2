#include "rc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

void VehicleParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "vehicle parameter '" << name << "' must be positive, got " << v;
      throw InvalidParameter(os.str());
    }
  };
  check(length, "length");
  check(width, "width");
  check(min_gap, "min_gap");
  check(v_max, "v_max");
  check(a_max, "a_max");
}

double min_gap_T(const VehicleParams& v) {
  v.validate();
  return (v.length + v.width + std::sqrt(2.0) * v.min_gap) / v.v_max;
}

std::string to_string(const LaneId& id) {
  std::ostringstream os;
  os << "leg" << id.leg << ":lane" << id.lane;
  return os.str();
}

IntersectionSpec::IntersectionSpec(int n_s, int n_l, VehicleParams vehicle)
    : n_s_(n_s), n_l_(n_l), vehicle_(vehicle) {
  if (n_s < 1 || n_l < 0) {
    throw InvalidParameter("lane counts require n_s >= 1 and n_l >= 0");
  }
  virtual_.assign(static_cast<std::size_t>(lane_count()), false);
  disabled_.assign(static_cast<std::size_t>(lane_count()), false);
}

bool IntersectionSpec::contains(const LaneId& id) const {
  return id.leg >= 0 && id.leg < kLegs && id.lane >= 1 && id.lane <= lanes_per_leg();
}

std::size_t IntersectionSpec::index(const LaneId& id) const {
  if (!contains(id)) throw InvalidParameter("no such lane " + to_string(id));
  return static_cast<std::size_t>(id.leg * lanes_per_leg() + id.lane - 1);
}

LaneId IntersectionSpec::lane_at(std::size_t index) const {
  const int per = lanes_per_leg();
  return {static_cast<int>(index) / per, static_cast<int>(index) % per + 1};
}

std::vector<LaneId> IntersectionSpec::lanes() const {
  std::vector<LaneId> out;
  out.reserve(static_cast<std::size_t>(lane_count()));
  for (int leg = 0; leg < kLegs; ++leg)
    for (int lane = 1; lane <= lanes_per_leg(); ++lane) out.push_back({leg, lane});
  return out;
}

IntersectionSpec virtualize(std::span<const LegLanes> legs, VehicleParams vehicle) {
  if (legs.size() != kLegs) throw InvalidParameter("an intersection needs exactly 4 legs");
  int n_s = 0;
  int n_l = 0;
  for (const auto& l : legs) {
    if (l.through < 1 || l.left < 0) {
      throw InvalidParameter("each leg needs at least one through lane and no negative counts");
    }
    n_s = std::max(n_s, l.through);
    n_l = std::max(n_l, l.left);
  }
  IntersectionSpec spec(n_s, n_l, vehicle);
  for (int leg = 0; leg < kLegs; ++leg) {
    const auto& raw = legs[static_cast<std::size_t>(leg)];
    for (int lane = raw.through + 1; lane <= n_s; ++lane) spec.set_virtual({leg, lane});
    for (int j = raw.left + 1; j <= n_l; ++j) spec.set_virtual({leg, n_s + j});
  }
  return spec;
}

LanePath lane_path(const IntersectionSpec& spec, const LaneId& lane) {
  const int n_s = spec.through_lanes();
  const int n_l = spec.left_lanes();
  if (!spec.contains(lane)) throw InvalidParameter("no such lane " + to_string(lane));

  LanePath path{lane, {}, {}};
  auto add = [&](LaneId other, SegmentClass before) {
    if (!path.crossings.empty()) path.segments.push_back(before);
    path.crossings.push_back(other);
  };
  const SegmentClass cat1{1, std::nullopt};

  const int a = lane.leg;
  if (spec.kind(lane.lane) == LaneKind::Through) {
    const int first = wrap_leg(a - 1);
    const int opposite = wrap_leg(a + 2);
    const int last = wrap_leg(a + 1);
    for (int j = 1; j <= n_s; ++j) add({first, j}, cat1);
    if (n_l > 0) {
      for (int j = 1; j <= n_l; ++j) add({opposite, n_s + j}, j == 1 ? SegmentClass{2, {}} : SegmentClass{4, {}});
      for (int j = n_l; j >= 1; --j) add({last, n_s + j}, j == n_l ? SegmentClass{3, {}} : SegmentClass{4, {}});
      for (int j = n_s; j >= 1; --j) add({last, j}, j == n_s ? SegmentClass{2, {}} : cat1);
    } else {
      // Without left lanes the two through groups are joined by a segment
      // that connects two through lanes.
      for (int j = n_s; j >= 1; --j) add({last, j}, cat1);
    }
  } else {
    const SegmentClass cat5{5, lane.lane};
    const int front = wrap_leg(a - 1);
    const int next = wrap_leg(a + 1);
    const int back = wrap_leg(a + 2);
    for (int j = 1; j <= n_s; ++j) add({front, j}, cat1);
    for (int j = n_l; j >= 1; --j) add({next, n_s + j}, j == n_l ? cat5 : cat1);
    for (int j = 1; j <= n_l; ++j) add({front, n_s + j}, cat1);
    for (int j = n_s; j >= 1; --j) add({back, j}, j == n_s ? cat5 : cat1);
  }
  return path;
}

char to_char(ConflictType t) {
  switch (t) {
    case ConflictType::A: return 'A';
    case ConflictType::B: return 'B';
    case ConflictType::C: return 'C';
    case ConflictType::D: return 'D';
  }
  return '?';
}

namespace {

int position_of(const LanePath& path, const LaneId& other) {
  auto it = std::find(path.crossings.begin(), path.crossings.end(), other);
  if (it == path.crossings.end()) {
    throw Error("topology inconsistency: " + to_string(path.lane) + " does not cross " +
                to_string(other));
  }
  return static_cast<int>(it - path.crossings.begin());
}

}  // namespace

std::vector<ConflictPoint> conflict_points(const IntersectionSpec& spec) {
  const int n_s = spec.through_lanes();
  const int n_l = spec.left_lanes();

  std::vector<LanePath> paths;
  for (const auto& l : spec.lanes()) paths.push_back(lane_path(spec, l));
  auto path_of = [&](const LaneId& l) -> const LanePath& { return paths[spec.index(l)]; };

  std::vector<ConflictPoint> out;
  auto emit = [&](LaneId x, LaneId y, ConflictType t) {
    ConflictPoint p;
    p.id = static_cast<int>(out.size());
    p.lane_a = x;
    p.lane_b = y;
    p.type = t;
    p.pos_a = position_of(path_of(x), y);
    p.pos_b = position_of(path_of(y), x);
    p.active = spec.is_active(x) && spec.is_active(y);
    out.push_back(p);
  };

  for (int a = 0; a < kLegs; ++a) {
    for (int l1 = 1; l1 <= n_s; ++l1) {
      for (int l2 = 1; l2 <= n_s; ++l2) emit({a, l1}, {wrap_leg(a - 1), l2}, ConflictType::A);
    }
  }
  for (int a = 0; a < kLegs; ++a) {
    for (int l1 = 1; l1 <= n_s; ++l1) {
      for (int l2 = n_s + 1; l2 <= n_s + n_l; ++l2) {
        emit({a, l1}, {wrap_leg(a + 2), l2}, ConflictType::B);
      }
    }
  }
  for (int a = 0; a < kLegs; ++a) {
    for (int l1 = 1; l1 <= n_s; ++l1) {
      for (int l2 = n_s + 1; l2 <= n_s + n_l; ++l2) {
        emit({a, l1}, {wrap_leg(a + 1), l2}, ConflictType::C);
      }
    }
  }
  for (int b = 0; b < kLegs; ++b) {
    for (int l1 = n_s + 1; l1 <= n_s + n_l; ++l1) {
      for (int l2 = n_s + 1; l2 <= n_s + n_l; ++l2) {
        emit({b, l1}, {wrap_leg(b + 1), l2}, ConflictType::D);
      }
    }
  }
  return out;
}

std::optional<ConflictPoint> find_point(std::span<const ConflictPoint> points, const LaneId& x,
                                        const LaneId& y) {
  for (const auto& p : points) {
    if ((p.lane_a == x && p.lane_b == y) || (p.lane_a == y && p.lane_b == x)) return p;
  }
  return std::nullopt;
}

}  // namespace rc
