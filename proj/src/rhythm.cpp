#include "rc/rhythm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

namespace {

/// Integer m with x == m * unit within kEpsTime, if any.
std::optional<long> as_multiple(double x, double unit) {
  const double q = x / unit;
  const long m = std::lround(q);
  if (std::abs(x - static_cast<double>(m) * unit) <= kEpsTime) return m;
  return std::nullopt;
}

bool is_odd(long m) { return (m % 2 + 2) % 2 == 1; }

double wrap_period(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0) r += period;
  if (period - r <= kEpsTime) r = 0.0;
  return r;
}

/// Circular distance of two residues modulo period.
double residue_distance(double a, double b, double period) {
  const double d = wrap_period(a - b, period);
  return std::min(d, period - d);
}

struct TimeWindow {
  double lo;
  double hi;
};

}  // namespace

double RhythmTiming::t5_of(int lane, int n_s) const {
  const auto j = static_cast<std::size_t>(lane - n_s - 1);
  if (lane <= n_s || j >= t5.size()) {
    throw InvalidParameter("no T5 value for lane " + std::to_string(lane));
  }
  return t5[j];
}

double RhythmTiming::segment_time(const SegmentClass& seg, int n_s) const {
  switch (seg.category) {
    case 1: return t1;
    case 2: return t2;
    case 3: return t3;
    case 4: return t4;
    case 5: return t5_of(seg.lane.value_or(0), n_s);
    default: throw InvalidParameter("unknown segment category");
  }
}

ConditionCheck check_conditions(const RhythmTiming& timing, double min_gap, int n_l) {
  ConditionCheck c;
  const double t1 = timing.t1;
  c.holds[0] = std::abs(t1 - min_gap) <= kEpsTime;

  auto odd_witness = [&](double x) -> std::optional<long> {
    auto m = as_multiple(x, t1);
    if (m && *m >= 1 && is_odd(*m)) return (*m - 1) / 2;
    return std::nullopt;
  };

  c.k0 = odd_witness(timing.t4);
  c.holds[1] = c.k0.has_value();
  c.k0p = odd_witness(2.0 * timing.t2 + timing.t3);
  c.holds[2] = c.k0p.has_value();

  const auto nl = static_cast<std::size_t>(n_l);
  if (timing.t5.size() != nl) throw InvalidParameter("T5 needs one value per left lane");
  c.holds[3] = true;
  for (std::size_t l = 0; l < nl; ++l) {
    c.k0pp.push_back(odd_witness(2.0 * timing.t5[l] + timing.t3));
    c.holds[3] = c.holds[3] && c.k0pp.back().has_value();
  }
  c.holds[4] = true;
  c.k0ppp.assign(nl, std::vector<std::optional<long>>(nl));
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = i + 1; j < nl; ++j) {
      auto m = as_multiple(timing.t5[i] - timing.t5[j], t1);
      if (m && *m >= 0 && !is_odd(*m)) c.k0ppp[i][j] = *m / 2;
      c.holds[4] = c.holds[4] && c.k0ppp[i][j].has_value();
    }
  }
  return c;
}

RhythmTiming timing_from_multiples(double t1, double m2, double m3, double m4,
                                   const std::vector<double>& m5) {
  RhythmTiming t;
  t.t1 = t1;
  t.t2 = m2 * t1;
  t.t3 = m3 * t1;
  t.t4 = m4 * t1;
  for (double m : m5) t.t5.push_back(m * t1);
  return t;
}

RhythmTiming solve_travel_times(const IntersectionSpec& spec, const SegmentLengths& lengths,
                                const SpeedBand& band) {
  const auto& v = spec.vehicle();
  const double t1 = min_gap_T(v);
  if (!(band.lo > 0.0) || !(band.lo < band.hi)) {
    throw InvalidParameter("speed band needs 0 < lo < hi");
  }
  if (band.hi > v.v_max + 1e-12) {
    throw InvalidParameter("speed band upper end cannot exceed v_max");
  }
  const int n_l = spec.left_lanes();
  if (!lengths.cat5.empty() && lengths.cat5.size() != static_cast<std::size_t>(n_l)) {
    throw InvalidParameter("cat5 lengths need one entry per left lane");
  }

  auto window = [&](double len) -> TimeWindow {
    if (len < 0) throw InvalidParameter("segment lengths must be non-negative");
    // Zero means nominal: a segment traversed at v_hi in exactly T1.
    if (len == 0.0) len = band.hi * t1;
    return {len / band.hi, len / band.lo};
  };
  auto describe = [&](const char* what, double len, auto multiple_time) {
    // Nearest reachable speeds on either side of the band.
    std::ostringstream os;
    os << std::setprecision(6) << what << " (length " << len << " m): no odd multiple of T1 = " << t1
       << " s puts the speed inside [" << band.lo << ", " << band.hi << "] m/s";
    double above = std::numeric_limits<double>::infinity();
    double below = 0.0;
    for (long m = 1; m < 100001; m += 2) {
      const double time = multiple_time(m);
      if (time <= 0) continue;
      const double speed = len / time;
      if (speed > band.hi) above = std::min(above, speed);
      if (speed < band.lo) {
        below = std::max(below, speed);
        break;
      }
    }
    os << "; nearest reachable speeds:";
    if (std::isfinite(above)) os << " " << above;
    if (below > 0) os << " " << below;
    os << " m/s";
    return os.str();
  };

  if (lengths.cat1 > 0.0) {
    const double speed = lengths.cat1 / t1;
    if (speed < band.lo - 1e-12 || speed > band.hi + 1e-12) {
      std::ostringstream os;
      os << "category 1 (length " << lengths.cat1 << " m) implies speed " << speed
         << " m/s outside the band";
      throw InfeasibleBand(os.str());
    }
  }

  auto smallest_odd = [&](double lo, double hi) -> std::optional<long> {
    long m = static_cast<long>(std::ceil(lo / t1 - 1e-9));
    if (m < 1) m = 1;
    if (!is_odd(m)) ++m;
    if (static_cast<double>(m) * t1 <= hi + kEpsTime) return m;
    return std::nullopt;
  };

  RhythmTiming out;
  out.t1 = t1;

  // T4: odd multiple directly.
  const bool has_cat4 = n_l >= 2;
  const TimeWindow w4 = window(has_cat4 ? lengths.cat4 : 0.0);
  auto m4 = smallest_odd(w4.lo, w4.hi);
  if (!m4) {
    throw InfeasibleBand(describe("category 4", lengths.cat4,
                                  [&](long m) { return static_cast<double>(m) * t1; }));
  }
  out.t4 = static_cast<double>(*m4) * t1;

  if (n_l == 0) {
    // Categories 2, 3 and 5 do not occur; keep the conditions satisfied.
    out.t2 = t1;
    out.t3 = t1;
    return out;
  }

  const TimeWindow w2 = window(lengths.cat2);
  const TimeWindow w3 = window(lengths.cat3);
  std::vector<TimeWindow> w5;
  for (int j = 0; j < n_l; ++j) {
    w5.push_back(window(lengths.cat5.empty() ? 0.0 : lengths.cat5[static_cast<std::size_t>(j)]));
  }

  // Half-time windows: x = (m t1 - t3) / 2 must land in [lo, hi].
  auto half_range = [&](const TimeWindow& w, double t3) -> std::pair<long, long> {
    long lo = static_cast<long>(std::ceil((2.0 * w.lo + t3) / t1 - 1e-9));
    long hi = static_cast<long>(std::floor((2.0 * w.hi + t3) / t1 + 1e-9));
    lo = std::max(lo, 1L);
    return {lo, hi};
  };
  auto first_odd_in = [](std::pair<long, long> r) -> std::optional<long> {
    long m = r.first;
    if (!is_odd(m)) ++m;
    if (m <= r.second) return m;
    return std::nullopt;
  };

  // Candidate T3 values: the lower end of its window and every value that
  // puts a dependent segment exactly at its slow end.
  std::vector<double> candidates{w3.lo};
  const long m_max = static_cast<long>(std::ceil((2.0 * w2.hi + w3.hi) / t1)) + 2;
  auto add_edges = [&](const TimeWindow& w) {
    for (long m = 1; m <= m_max + static_cast<long>(std::ceil(2.0 * w.hi / t1)) + 2; m += 2) {
      const double t3 = static_cast<double>(m) * t1 - 2.0 * w.hi;
      if (t3 >= w3.lo - kEpsTime && t3 <= w3.hi + kEpsTime) candidates.push_back(t3);
    }
  };
  add_edges(w2);
  for (const auto& w : w5) add_edges(w);
  std::sort(candidates.begin(), candidates.end());

  for (double t3 : candidates) {
    t3 = std::clamp(t3, w3.lo, w3.hi);
    auto m2 = first_odd_in(half_range(w2, t3));
    if (!m2) continue;

    // k'' values: same parity, non-increasing with lane number.
    std::optional<std::vector<long>> best;
    for (long parity = 0; parity < 2; ++parity) {
      std::vector<long> ks(static_cast<std::size_t>(n_l));
      bool ok = true;
      long floor_k = 0;
      for (int j = n_l - 1; j >= 0 && ok; --j) {
        auto r = half_range(w5[static_cast<std::size_t>(j)], t3);
        long klo = std::max(r.first / 2, floor_k);  // 2k + 1 >= r.first
        if (klo % 2 != parity) ++klo;
        if (2 * klo + 1 > r.second) {
          ok = false;
          break;
        }
        ks[static_cast<std::size_t>(j)] = klo;
        floor_k = klo;
      }
      if (!ok) continue;
      if (!best || ks < *best) best = ks;
    }
    if (!best) continue;

    out.t3 = t3;
    out.t2 = (static_cast<double>(*m2) * t1 - t3) / 2.0;
    out.t5.clear();
    for (long k : *best) out.t5.push_back((static_cast<double>(2 * k + 1) * t1 - t3) / 2.0);
    return out;
  }

  std::ostringstream os;
  os << std::setprecision(6) << "no T3 in [" << w3.lo << ", " << w3.hi
     << "] s admits T2 and T5 inside the speed band [" << band.lo << ", " << band.hi << "] m/s";
  throw InfeasibleBand(os.str());
}

double LaneSchedule::next_slot(double t) const {
  const double k = std::ceil((t - offset - kEpsTime) / period);
  return offset + k * period;
}

EntrySchedule entry_schedule(const IntersectionSpec& spec, const RhythmTiming& timing) {
  EntrySchedule s;
  s.t1 = timing.t1;
  const double period = 2.0 * timing.t1;
  const int n_s = spec.through_lanes();
  const int n_l = spec.left_lanes();
  for (const auto& id : spec.lanes()) {
    double raw = 0.0;
    if (spec.kind(id.lane) == LaneKind::Through) {
      raw = (id.lane % 2 == 1) ? timing.t1 : 0.0;
    } else {
      const int rel = id.lane - n_s;
      const int t4_count = (rel % 2 == 1) ? 2 * n_l : 2 * n_l - 1;
      raw = (n_s - 1) * timing.t1 + t4_count * timing.t4 + timing.t2 + timing.t3;
    }
    s.lanes.push_back({id, wrap_period(raw, period), period, spec.is_active(id)});
  }
  return s;
}

std::vector<double> crossing_offsets(const IntersectionSpec& spec, const RhythmTiming& timing,
                                     const LaneId& lane) {
  const auto path = lane_path(spec, lane);
  std::vector<double> out{0.0};
  for (const auto& seg : path.segments) {
    out.push_back(out.back() + timing.segment_time(seg, spec.through_lanes()));
  }
  return out;
}

std::array<double, 2> closed_form_arrivals(const IntersectionSpec& spec, const RhythmTiming& timing,
                                           const ConflictPoint& p) {
  const double n_s = spec.through_lanes();
  const double n_l = spec.left_lanes();
  const double t1 = timing.t1, t2 = timing.t2, t3 = timing.t3, t4 = timing.t4;
  const double l1 = p.lane_a.lane;
  const double l2 = p.lane_b.lane;
  switch (p.type) {
    case ConflictType::A: {
      const double ta = (l1 + l2 - 1) * t1;
      if (spec.left_lanes() == 0) return {ta, (l2 + 2 * n_s - l1) * t1};
      return {ta, l2 * t1 + 2 * t2 + t3 + 2 * (n_l - 1) * t4 + (2 * n_s - 1 - l1) * t1};
    }
    case ConflictType::B: {
      const double t5 = timing.t5_of(p.lane_b.lane, spec.through_lanes());
      return {(l1 + n_s - 1) * t1 + t2 + (l2 - n_s - 1) * t4,
              (3 * n_s + 2 * n_l - l1 - 3) * t1 + (2 * n_l + n_s - l2 - 1) * t4 + t2 + t3 + 2 * t5};
    }
    case ConflictType::C: {
      const double common = (2 * n_l + n_s - l2 - 1) * t4 + t2 + t3;
      return {(l1 + n_s - 1) * t1 + common, (l1 + n_s - 2) * t1 + common};
    }
    case ConflictType::D: {
      const int ns = spec.through_lanes();
      return {(3 * n_s + n_l - l2 - 2) * t1 + (2 * n_l + n_s - l1 - 1) * t4 + t2 + t3 +
                  timing.t5_of(p.lane_a.lane, ns),
              (n_s + n_l + l1 - 3) * t1 + (2 * n_l + n_s - l2 - 1) * t4 + t2 + t3 +
                  timing.t5_of(p.lane_b.lane, ns)};
    }
  }
  return {0.0, 0.0};
}

const PointAudit* AuditReport::first_failure() const {
  for (const auto& p : points)
    if (!p.pass) return &p;
  return nullptr;
}

namespace {

struct PairScan {
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_a = 0.0;
  double worst_b = 0.0;
  bool all_odd = true;
};

PairScan scan_pairs(double base_a, double base_b, double t1, int k_window) {
  PairScan s;
  const double period = 2.0 * t1;
  for (int i = -k_window; i <= k_window; ++i) {
    const double ta = base_a + i * period;
    for (int j = -k_window; j <= k_window; ++j) {
      const double tb = base_b + j * period;
      const double d = std::abs(ta - tb);
      if (d < s.min_gap) {
        s.min_gap = d;
        s.worst_a = ta;
        s.worst_b = tb;
      }
      auto m = as_multiple(d, t1);
      if (!m || !is_odd(*m)) s.all_odd = false;
    }
  }
  return s;
}

}  // namespace

AuditReport audit(const IntersectionSpec& spec, const RhythmTiming& timing, int k_window) {
  if (k_window < 2) throw InvalidParameter("audit window must cover at least 2 periods");
  AuditReport report;
  report.min_gap = min_gap_T(spec.vehicle());
  report.k_window = k_window;
  report.pass = true;

  const auto schedule = entry_schedule(spec, timing);
  std::vector<std::vector<double>> offsets;
  for (const auto& id : spec.lanes()) offsets.push_back(crossing_offsets(spec, timing, id));

  const double period = 2.0 * timing.t1;
  for (const auto& p : conflict_points(spec)) {
    if (!p.active) continue;
    PointAudit pa;
    pa.point = p;
    const auto closed = closed_form_arrivals(spec, timing, p);
    const double ea = schedule.at(spec, p.lane_a).offset +
                      offsets[spec.index(p.lane_a)][static_cast<std::size_t>(p.pos_a)];
    const double eb = schedule.at(spec, p.lane_b).offset +
                      offsets[spec.index(p.lane_b)][static_cast<std::size_t>(p.pos_b)];

    const auto by_formula = scan_pairs(closed[0], closed[1], timing.t1, k_window);
    const auto by_schedule = scan_pairs(ea, eb, timing.t1, k_window);

    pa.min_headway = by_formula.min_gap;
    pa.min_headway_enumerated = by_schedule.min_gap;
    pa.worst_a = by_formula.worst_a;
    pa.worst_b = by_formula.worst_b;
    pa.odd_multiple = by_formula.all_odd && by_schedule.all_odd;
    pa.routes_agree = residue_distance(closed[0], ea, period) <= kEpsTime &&
                      residue_distance(closed[1], eb, period) <= kEpsTime;
    pa.pass = pa.odd_multiple && pa.routes_agree &&
              pa.min_headway >= report.min_gap - kEpsTime &&
              pa.min_headway_enumerated >= report.min_gap - kEpsTime;
    report.pass = report.pass && pa.pass;
    report.points.push_back(pa);
  }
  return report;
}

std::string format_report(const AuditReport& report) {
  std::ostringstream os;
  os << std::setprecision(9);
  os << "rhythm audit: " << (report.pass ? "PASS" : "FAIL") << "\n";
  os << "  required gap T = " << report.min_gap << " s, window +/-" << report.k_window
     << " periods, " << report.points.size() << " active conflict points\n";
  std::array<int, 4> per_type{};
  for (const auto& p : report.points) ++per_type[static_cast<std::size_t>(p.point.type)];
  os << "  points by type: A=" << per_type[0] << " B=" << per_type[1] << " C=" << per_type[2]
     << " D=" << per_type[3] << "\n";
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : report.points) worst = std::min(worst, p.min_headway);
  if (!report.points.empty()) os << "  smallest headway: " << worst << " s\n";
  int shown = 0;
  for (const auto& p : report.points) {
    if (p.pass) continue;
    if (shown++ == 10) {
      os << "  ...\n";
      break;
    }
    os << "  counterexample: point " << p.point.id << " type " << to_char(p.point.type) << " "
       << to_string(p.point.lane_a) << " x " << to_string(p.point.lane_b)
       << ": arrivals " << p.worst_a << " and " << p.worst_b << " (gap " << p.min_headway
       << " s, odd multiple " << (p.odd_multiple ? "yes" : "no") << ", routes agree "
       << (p.routes_agree ? "yes" : "no") << ")\n";
  }
  return os.str();
}

std::vector<int> row_profile(const EntrySchedule& schedule, double horizon, double resolution,
                             double occupancy) {
  if (!(resolution > 0.0) || resolution > schedule.t1 / 4.0 + 1e-15) {
    throw InvalidParameter("ROW profile resolution must be in (0, T1/4]");
  }
  if (horizon < 0) throw InvalidParameter("horizon must be non-negative");
  const auto steps = static_cast<std::size_t>(std::floor(horizon / resolution + 1e-9)) + 1;
  std::vector<int> counts(steps, 0);
  for (const auto& lane : schedule.lanes) {
    if (!lane.schedulable) continue;
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) * resolution;
      const double since = wrap_period(t - lane.offset, lane.period);
      if (since < occupancy - kEpsTime) ++counts[i];
    }
  }
  return counts;
}

double geometric_oracle(const VehicleParams& v, double gap, std::size_t samples) {
  v.validate();
  if (gap < 0) throw InvalidParameter("time offset must be non-negative");
  if (samples < 1000) throw InvalidParameter("geometric oracle needs at least 1000 samples");
  const double vm = v.v_max;
  const double span = (v.length + v.width) / vm + 1.0;
  const double t_lo = -gap - span;
  const double t_hi = span;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    // Vehicle 1 runs along x centered at (vm t, 0); vehicle 2 along y,
    // centered at (0, vm (t + gap)). Gap between the two rectangles.
    const double half = 0.5 * (v.length + v.width);
    const double dx = std::max(0.0, std::abs(vm * t) - half);
    const double dy = std::max(0.0, std::abs(vm * (t + gap)) - half);
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

}  // namespace rc
