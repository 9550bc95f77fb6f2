#include "rc/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

void AdjustmentZone::validate(const VehicleParams& v) const {
  v.validate();
  const double vq = cruise_speed_vq(v);
  const double ramp = (v.v_max * v.v_max - vq * vq) / v.a_max;
  if (!(length > 0.0) || length < ramp) {
    std::ostringstream os;
    os << "adjustment zone of " << length << " m cannot hold the " << ramp
       << " m needed to slow to v_q and recover";
    throw ZoneTooShort(os.str());
  }
}

double cruise_speed_vq(const VehicleParams& v) {
  return (v.length + v.min_gap) / (2.0 * min_gap_T(v));
}

double follower_shift(const VehicleParams& v) {
  return (v.length + std::sqrt(2.0) * v.min_gap + 2.0 * v.width) / (v.v_max - cruise_speed_vq(v));
}

const char* to_string(CurveShape s) {
  switch (s) {
    case CurveShape::Free: return "free";
    case CurveShape::Triangular: return "triangular";
    case CurveShape::Plateau: return "plateau";
  }
  return "?";
}

DeltaT solve_delta_t(double t0, double target, const AdjustmentZone& zone, const VehicleParams& v) {
  const double vm = v.v_max;
  const double am = v.a_max;
  const double tau = target - t0;
  const double free = zone.length / vm;
  if (tau < free - kEpsTime) {
    std::ostringstream os;
    os << "target " << target << " is earlier than free-flow arrival " << t0 + free;
    throw InfeasibleTarget(os.str());
  }
  const double lost = std::max(0.0, vm * tau - zone.length);  // distance given up
  DeltaT out;
  if (lost <= vm * kEpsTime) {
    out.v_low = vm;
    return out;
  }
  const double vq = cruise_speed_vq(v);
  const double tri = 2.0 * std::sqrt(lost / am);
  if (tri <= 2.0 * (vm - vq) / am) {
    out.dt = tri;
    out.v_low = vm - am * tri / 2.0;
    out.shape = CurveShape::Triangular;
  } else {
    out.dt = (lost + (vm - vq) * (vm - vq) / am) / (vm - vq);
    out.v_low = vq;
    out.shape = CurveShape::Plateau;
  }
  if (out.dt > tau + kEpsTime) {
    std::ostringstream os;
    os << "zone of " << zone.length << " m cannot absorb a delay of " << tau - free
       << " s (needs " << out.dt << " s of slow-down within " << tau << " s)";
    throw ZoneTooShort(os.str());
  }
  return out;
}

namespace {

struct Phase {
  double start;
  double x;
  double v;
  double a;
};

/// Constant-acceleration pieces covering [ts, inf) plus the cruise before.
std::array<Phase, 4> phases(const SpeedCurve& c) {
  const double r = (c.v_max - c.v_low) / c.a_max;
  const double t1 = c.ts + r;
  const double t2 = c.te - r;
  const double xs = c.v_max * (c.ts - c.t0);
  const double x1 = xs + c.v_max * r - 0.5 * c.a_max * r * r;
  const double x2 = x1 + c.v_low * (t2 - t1);
  const double xe = x2 + c.v_low * r + 0.5 * c.a_max * r * r;
  return {Phase{c.ts, xs, c.v_max, -c.a_max}, Phase{t1, x1, c.v_low, 0.0},
          Phase{t2, x2, c.v_low, c.a_max}, Phase{c.te, xe, c.v_max, 0.0}};
}

const Phase* phase_at(const std::array<Phase, 4>& ph, double t) {
  const Phase* cur = nullptr;
  for (const auto& p : ph) {
    if (t >= p.start) cur = &p;
  }
  return cur;
}

}  // namespace

double SpeedCurve::position(double t) const {
  if (t <= ts) return v_max * (t - t0);
  const auto ph = phases(*this);
  const Phase* p = phase_at(ph, t);
  const double u = t - p->start;
  return p->x + p->v * u + 0.5 * p->a * u * u;
}

double SpeedCurve::speed(double t) const {
  if (t <= ts) return v_max;
  const auto ph = phases(*this);
  const Phase* p = phase_at(ph, t);
  return p->v + p->a * (t - p->start);
}

double SpeedCurve::accel(double t) const {
  if (t < ts) return 0.0;
  const auto ph = phases(*this);
  const Phase* p = phase_at(ph, t);
  // Zero-length phases share a start time; the later one wins.
  return p->a;
}

std::vector<double> SpeedCurve::breakpoints() const {
  const double r = (v_max - v_low) / a_max;
  return {t0, ts, ts + r, te - r, te, target};
}

SpeedCurve make_curve(double t0, double target, double te, const AdjustmentZone& zone,
                      const VehicleParams& v) {
  const auto d = solve_delta_t(t0, target, zone, v);
  const double ts = te - d.dt;
  if (ts < t0 - kEpsTime || te > target + kEpsTime) {
    std::ostringstream os;
    os << "slow-down of " << d.dt << " s ending at " << te << " does not fit in [" << t0 << ", "
       << target << "]";
    throw ZoneTooShort(os.str());
  }
  SpeedCurve c;
  c.t0 = t0;
  c.ts = std::max(ts, t0);
  c.te = std::min(te, target);
  c.target = target;
  c.v_max = v.v_max;
  c.v_low = d.v_low;
  c.a_max = v.a_max;
  c.zone_length = zone.length;
  c.shape = d.shape;
  return c;
}

double spacing_check(const SpeedCurve& lead, const SpeedCurve& follow, const VehicleParams& v,
                     double step) {
  if (!(step > 0.0)) throw InvalidParameter("spacing step must be positive");
  const double lo = std::max(lead.t0, follow.t0);
  const double hi = std::max(lo, follow.target);
  auto gap = [&](double t) { return lead.position(t) - follow.position(t) - v.length; };

  std::vector<double> ts{lo, hi};
  for (double t : lead.breakpoints()) ts.push_back(t);
  for (double t : follow.breakpoints()) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  // Interior extrema: where the two speeds match inside a piece.
  std::vector<double> extra;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = ts[i];
    const double b = ts[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double da = lead.accel(mid) - follow.accel(mid);
    const double dv = lead.speed(a) - follow.speed(a);
    if (std::abs(da) > 1e-12) {
      const double t = a - dv / da;
      if (t > a && t < b) extra.push_back(t);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double t) {
    if (t >= lo && t <= hi) best = std::min(best, gap(t));
  };
  for (double t : ts) consider(t);
  for (double t : extra) consider(t);
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 0; i <= n; ++i) consider(lo + static_cast<double>(i) * (hi - lo) / std::max(n, 1L));
  return best;
}

SpeedCurve assign_curve(double t0, const SpeedCurve* prev, const LaneSchedule& lane,
                        const AdjustmentZone& zone, const VehicleParams& v, int max_advances) {
  double earliest = t0 + zone.length / v.v_max;
  if (prev) earliest = std::max(earliest, prev->target + 0.5 * lane.period);
  double target = lane.next_slot(earliest - kEpsTime);
  if (target < earliest - kEpsTime) target += lane.period;

  auto spaced = [&](const SpeedCurve& c) {
    return !prev || spacing_check(*prev, c, v) >= v.min_gap - kEpsDist;
  };

  for (int attempt = 0; attempt <= max_advances; ++attempt, target += lane.period) {
    SpeedCurve c;
    try {
      c = make_curve(t0, target, target, zone, v);
    } catch (const ZoneTooShort& e) {
      throw ZoneOverflow(std::string("queue spills back past the adjustment zone: ") + e.what());
    }
    if (spaced(c)) return c;

    const double dt = c.delta_t();
    const double te = dt >= prev->delta_t() ? prev->te : prev->te + follower_shift(v);
    if (te <= target + kEpsTime) {
      try {
        auto shifted = make_curve(t0, target, te, zone, v);
        if (spaced(shifted)) return shifted;
      } catch (const ZoneTooShort&) {
        // Not realizable at this slot; try the next one.
      }
    }
  }
  std::ostringstream os;
  os << "no spacing-compatible slot within " << max_advances << " periods of " << earliest;
  throw ZoneOverflow(os.str());
}

}  // namespace rc
