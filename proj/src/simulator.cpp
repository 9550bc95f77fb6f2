#include "rc/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

const char* to_string(ArrivalKind k) {
  return k == ArrivalKind::Stationary ? "stationary" : "nonstationary";
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::RC: return "RC";
    case Scheme::TSC: return "TSC";
    case Scheme::FCFS: return "FCFS";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "RC") return Scheme::RC;
  if (u == "TSC") return Scheme::TSC;
  if (u == "FCFS") return Scheme::FCFS;
  throw InvalidParameter("unknown scheme '" + s + "' (expected RC, TSC or FCFS)");
}

void DemandScenario::validate() const {
  for (std::size_t i = 0; i < demand.size(); ++i) {
    if (!(demand[i] >= 0.0)) {
      std::ostringstream os;
      os << "demand[" << i << "] must be non-negative, got " << demand[i];
      throw InvalidParameter(os.str());
    }
  }
  if (!(alpha >= 0.0)) throw InvalidParameter("alpha must be non-negative");
  if (!(duration > 0.0)) throw InvalidParameter("duration must be positive");
  if (shift && !(*shift >= 0.0)) throw InvalidParameter("headway shift must be non-negative");
  burst.validate();
}

double DemandScenario::lane_rate(const IntersectionSpec& spec, const LaneId& id) const {
  if (!spec.is_active(id)) return 0.0;
  const std::size_t k = static_cast<std::size_t>(id.leg) + (spec.kind(id.lane) == LaneKind::Left ? 4 : 0);
  return alpha * demand[k] / 3600.0;
}

DemandScenario balanced_demand() {
  DemandScenario d;
  d.name = "balanced";
  d.demand = {1300, 1300, 1300, 1300, 1100, 1100, 1100, 1100};
  return d;
}

DemandScenario imbalanced_demand() {
  DemandScenario d;
  d.name = "imbalanced";
  d.demand = {1600, 1600, 1600, 1600, 800, 800, 800, 800};
  return d;
}

DemandScenario heavy_demand() {
  DemandScenario d;
  d.name = "highly_imbalanced";
  d.demand = {2600, 1400, 1400, 1400, 400, 400, 400, 400};
  return d;
}

LaneArrivals generate_arrivals(const DemandScenario& sc, const IntersectionSpec& spec) {
  sc.validate();
  const double shift = sc.shift.value_or(headway_shift(spec.vehicle()));
  LaneArrivals out(static_cast<std::size_t>(spec.lane_count()));
  for (const auto& id : spec.lanes()) {
    const std::size_t i = spec.index(id);
    const double rate = sc.lane_rate(spec, id);
    const std::uint64_t seed = mix_seed(sc.seed, i);
    out[i] = sc.kind == ArrivalKind::Stationary
                 ? gen_stationary(rate, sc.duration, seed, shift)
                 : gen_nonstationary(rate, sc.duration, seed, shift, sc.burst);
  }
  return out;
}

namespace {

/// Fills per-lane tallies and aggregates from records and the horizon.
void finish(RunResult& r, const IntersectionSpec& spec, double duration) {
  r.duration = duration;
  r.lanes.clear();
  for (const auto& id : spec.lanes()) r.lanes.push_back(LaneTally{id, 0, 0, 0});
  double total = 0.0;
  double waiting = 0.0;
  for (const auto& v : r.records) {
    auto& t = r.lanes[spec.index(v.lane)];
    ++t.arrivals;
    if (v.entry <= duration + kEpsTime) ++t.throughput;
    total += v.delay;
    const double lo = std::clamp(v.arrival, 0.0, duration);
    const double hi = std::clamp(v.entry, 0.0, duration);
    waiting += hi - lo;
  }
  r.arrivals = r.throughput = r.residual = 0;
  for (auto& t : r.lanes) {
    t.residual = t.arrivals - t.throughput;
    r.arrivals += t.arrivals;
    r.throughput += t.throughput;
    r.residual += t.residual;
  }
  r.avg_delay = r.records.empty() ? 0.0 : total / static_cast<double>(r.records.size());
  r.mean_queue = waiting / duration;
}

void note(RunResult& r, const std::string& msg) {
  r.audit_ok = false;
  if (r.audit_notes.size() < 20) r.audit_notes.push_back(msg);
}

}  // namespace

// ---------------------------------------------------------------- RC

RunResult run_rc(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                 const EntrySchedule& schedule, const RcParams& p) {
  RunResult r;
  r.scheme = Scheme::RC;
  long id = 0;
  for (const auto& lane : spec.lanes()) {
    const auto& ls = schedule.at(spec, lane);
    const auto& ts = arrivals[spec.index(lane)];
    if (!ts.empty() && !ls.schedulable) {
      throw InvalidParameter("traffic on unschedulable lane " + to_string(lane));
    }
    double last = -std::numeric_limits<double>::infinity();
    for (double a : ts) {
      double slot = ls.next_slot(a);
      if (slot < last + ls.period - kEpsTime) slot = last + ls.period;
      last = slot;
      r.records.push_back(VehicleRecord{id++, lane, a, slot, slot - a + p.systematic_delay});
    }
  }
  finish(r, spec, duration);

  // One vehicle per slot, every entry on the lane's grid.
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& v = r.records[i];
    const auto& ls = schedule.at(spec, v.lane);
    const double k = (v.entry - ls.offset) / ls.period;
    if (std::abs(k - std::round(k)) > 1e-6) note(r, "off-grid entry on " + to_string(v.lane));
    if (v.entry < v.arrival - kEpsTime) note(r, "entry before arrival on " + to_string(v.lane));
    if (i > 0 && r.records[i - 1].lane == v.lane && v.entry - r.records[i - 1].entry < ls.period - 1e-6) {
      note(r, "two vehicles in one slot on " + to_string(v.lane));
    }
  }
  return r;
}

RunResult run_rc(const DemandScenario& sc, const IntersectionSpec& spec, const RhythmTiming& timing,
                 const RcParams& p) {
  const auto rep = audit(spec, timing);
  if (!rep.pass) throw InvalidParameter("rhythm timing fails the collision audit:\n" + format_report(rep));
  return run_rc(generate_arrivals(sc, spec), sc.duration, spec, entry_schedule(spec, timing), p);
}

// ---------------------------------------------------------------- TSC

double WebsterPlan::green_start(int i) const {
  double s = 0.0;
  for (int j = 0; j < i; ++j) s += green[static_cast<std::size_t>(j)] + loss / 4.0;
  return s;
}

WebsterPlan webster_plan(const std::array<double, 4>& y, const TscParams& p) {
  if (!(p.phase_loss >= 0.0) || !(p.g_min > 0.0)) throw InvalidParameter("bad TSC timing parameters");
  WebsterPlan w;
  w.y = y;
  for (double v : y) {
    if (!(v >= 0.0)) throw InvalidParameter("flow ratios must be non-negative");
    w.Y += v;
  }
  w.loss = 4.0 * p.phase_loss;
  const double floor_c = 4.0 * p.g_min + w.loss;
  if (p.max_cycle < floor_c) throw InvalidParameter("max cycle shorter than minimum greens plus loss");
  if (w.Y < 1.0) {
    w.cycle = std::clamp((1.5 * w.loss + 5.0) / (1.0 - w.Y), floor_c, p.max_cycle);
  } else {
    w.cycle = p.max_cycle;
    w.oversaturated = true;
  }

  // Proportional split; phases pinned at g_min drop out and the rest is
  // shared again.
  const double G = w.cycle - w.loss;
  std::array<bool, 4> pinned{};
  for (int round = 0; round < 4; ++round) {
    double left = G;
    double weight = 0.0;
    int free = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (pinned[i]) {
        left -= p.g_min;
      } else {
        weight += y[i];
        ++free;
      }
    }
    bool changed = false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (pinned[i]) {
        w.green[i] = p.g_min;
        continue;
      }
      w.green[i] = weight > 0.0 ? left * y[i] / weight : left / free;
      if (w.green[i] < p.g_min) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return w;
}

int tsc_phase(const IntersectionSpec& spec, const LaneId& id) {
  const bool ns = id.leg % 2 == 0;
  const bool left = spec.kind(id.lane) == LaneKind::Left;
  return (ns ? 0 : 2) + (left ? 1 : 0);
}

RunResult run_tsc(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                  const WebsterPlan& plan, const TscParams& p) {
  const double h = p.h_sat.value_or(headway_shift(spec.vehicle()));
  RunResult r;
  r.scheme = Scheme::TSC;
  r.oversaturated = plan.oversaturated;
  const double C = plan.cycle;
  long id = 0;
  for (const auto& lane : spec.lanes()) {
    const int ph = tsc_phase(spec, lane);
    const double gs = plan.green_start(ph);
    const double g = plan.green[static_cast<std::size_t>(ph)];
    double last = -std::numeric_limits<double>::infinity();
    for (double a : arrivals[spec.index(lane)]) {
      double t = std::max(a, last + h);
      const double u = t - gs - std::floor((t - gs) / C) * C;
      if (u >= g - kEpsTime) t += C - u;
      last = t;
      r.records.push_back(VehicleRecord{id++, lane, a, t, t - a});
    }
  }
  finish(r, spec, duration);

  // Green windows are pairwise disjoint and fit in the cycle.
  for (int i = 0; i < 4; ++i) {
    const double end = plan.green_start(i) + plan.green[static_cast<std::size_t>(i)];
    const double next = i < 3 ? plan.green_start(i + 1) : C;
    if (end > next + kEpsTime) note(r, "overlapping green windows");
  }
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& v = r.records[i];
    const int ph = tsc_phase(spec, v.lane);
    const double gs = plan.green_start(ph);
    const double u = v.entry - gs - std::floor((v.entry - gs) / C) * C;
    if (u > plan.green[static_cast<std::size_t>(ph)] + 1e-6 && u < C - 1e-6) {
      note(r, "departure outside green on " + to_string(v.lane));
    }
    if (i > 0 && r.records[i - 1].lane == v.lane && v.entry - r.records[i - 1].entry < h - 1e-6) {
      note(r, "saturation headway violated on " + to_string(v.lane));
    }
  }
  return r;
}

RunResult run_tsc(const DemandScenario& sc, const IntersectionSpec& spec, const TscParams& p) {
  const double h = p.h_sat.value_or(headway_shift(spec.vehicle()));
  if (!(h > 0.0)) throw InvalidParameter("saturation headway must be positive");
  std::array<double, 4> y{};
  for (const auto& lane : spec.lanes()) {
    auto& v = y[static_cast<std::size_t>(tsc_phase(spec, lane))];
    v = std::max(v, sc.lane_rate(spec, lane) * h);
  }
  return run_tsc(generate_arrivals(sc, spec), sc.duration, spec, webster_plan(y, p), p);
}

// ---------------------------------------------------------------- FCFS

ReservationBook::ReservationBook(std::size_t points, double min_gap, double tick)
    : min_gap_(min_gap), tick_(tick), times_(points) {
  if (!(min_gap > 0.0) || !(tick > 0.0)) throw InvalidParameter("gap and tick must be positive");
}

double ReservationBook::conflict_free_after(double t, const std::vector<Crossing>& path) const {
  // Returns t when every crossing clears, otherwise the earliest time the
  // first blocking reservation allows.
  for (const auto& c : path) {
    const auto& v = times_[c.point];
    const double x = t + c.offset;
    auto it = std::lower_bound(v.begin(), v.end(), x - min_gap_ + kEpsTime);
    if (it != v.end() && *it < x + min_gap_ - kEpsTime) {
      // Skip past the whole blocking run at this point.
      double need = *it + min_gap_;
      for (++it; it != v.end() && *it < need + min_gap_ - kEpsTime; ++it) need = *it + min_gap_;
      return need - c.offset;
    }
  }
  return t;
}

double ReservationBook::reserve(double earliest, const std::vector<Crossing>& path) {
  auto k = static_cast<long>(std::ceil(earliest / tick_ - 1e-9));
  while (true) {
    const double t = static_cast<double>(k) * tick_;
    const double ok = conflict_free_after(t, path);
    if (ok == t) break;
    k = std::max(k + 1, static_cast<long>(std::ceil(ok / tick_ - 1e-9)));
  }
  const double t = static_cast<double>(k) * tick_;
  for (const auto& c : path) {
    auto& v = times_[c.point];
    v.insert(std::upper_bound(v.begin(), v.end(), t + c.offset), t + c.offset);
  }
  return t;
}

double ReservationBook::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : times_) {
    for (std::size_t i = 1; i < v.size(); ++i) best = std::min(best, v[i] - v[i - 1]);
  }
  return best;
}

RunResult run_fcfs(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                   const RhythmTiming& timing, const FcfsParams& p) {
  const double gap = min_gap_T(spec.vehicle());
  const double h = headway_shift(spec.vehicle());
  const auto points = conflict_points(spec);
  ReservationBook book(points.size(), gap, p.tick);

  std::vector<std::vector<ReservationBook::Crossing>> paths(static_cast<std::size_t>(spec.lane_count()));
  for (const auto& lane : spec.lanes()) {
    const auto off = crossing_offsets(spec, timing, lane);
    auto& path = paths[spec.index(lane)];
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& cp = points[k];
      if (cp.lane_a == lane) path.push_back({k, off[static_cast<std::size_t>(cp.pos_a)]});
      if (cp.lane_b == lane) path.push_back({k, off[static_cast<std::size_t>(cp.pos_b)]});
    }
  }

  struct Req {
    double arrival;
    std::size_t lane;
    std::size_t seq;
  };
  std::vector<Req> queue;
  for (std::size_t l = 0; l < arrivals.size(); ++l) {
    for (std::size_t s = 0; s < arrivals[l].size(); ++s) queue.push_back({arrivals[l][s], l, s});
  }
  std::sort(queue.begin(), queue.end(), [](const Req& a, const Req& b) {
    return a.arrival != b.arrival ? a.arrival < b.arrival : a.lane < b.lane;
  });

  std::vector<std::vector<double>> entry(arrivals.size());
  for (std::size_t l = 0; l < arrivals.size(); ++l) entry[l].resize(arrivals[l].size());
  std::vector<double> last(arrivals.size(), -std::numeric_limits<double>::infinity());
  for (const auto& q : queue) {
    const double t = book.reserve(std::max(q.arrival, last[q.lane] + h), paths[q.lane]);
    last[q.lane] = t;
    entry[q.lane][q.seq] = t;
  }

  RunResult r;
  r.scheme = Scheme::FCFS;
  long id = 0;
  for (const auto& lane : spec.lanes()) {
    const std::size_t l = spec.index(lane);
    for (std::size_t s = 0; s < arrivals[l].size(); ++s) {
      r.records.push_back(VehicleRecord{id++, lane, arrivals[l][s], entry[l][s], entry[l][s] - arrivals[l][s]});
    }
  }
  finish(r, spec, duration);
  if (book.min_separation() < gap - 1e-9) {
    std::ostringstream os;
    os << "reservations " << book.min_separation() << " s apart at a conflict point";
    note(r, os.str());
  }
  return r;
}

RunResult run_fcfs(const DemandScenario& sc, const IntersectionSpec& spec, const RhythmTiming& timing,
                   const FcfsParams& p) {
  return run_fcfs(generate_arrivals(sc, spec), sc.duration, spec, timing, p);
}

RunResult run_scheme(Scheme s, const DemandScenario& sc, const IntersectionSpec& spec,
                     const RhythmTiming& timing, const SchemeParams& p) {
  switch (s) {
    case Scheme::RC: return run_rc(sc, spec, timing, p.rc);
    case Scheme::TSC: return run_tsc(sc, spec, p.tsc);
    case Scheme::FCFS: return run_fcfs(sc, spec, timing, p.fcfs);
  }
  throw InvalidParameter("unknown scheme");
}

}  // namespace rc
