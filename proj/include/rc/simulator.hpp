#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rc/arrivals.hpp"
#include "rc/geometry.hpp"
#include "rc/rhythm.hpp"

namespace rc {

enum class ArrivalKind { Stationary, Nonstationary };

const char* to_string(ArrivalKind k);

/// Demand in veh/h per lane: entries 0..3 are the through lanes of legs
/// 0..3, entries 4..7 the left lanes of legs 0..3. Every real lane of a
/// group gets rate alpha * d / 3600.
struct DemandScenario {
  std::string name = "custom";
  std::array<double, 8> demand{};
  double alpha = 1.0;
  ArrivalKind kind = ArrivalKind::Stationary;
  BurstTemplate burst;
  double duration = 3600.0;
  std::uint64_t seed = 1;
  /// Overrides the (L + delta) / v_max headway shift; 0 gives Poisson.
  std::optional<double> shift;

  void validate() const;
  /// veh/s on one lane.
  double lane_rate(const IntersectionSpec& spec, const LaneId& id) const;
  bool operator==(const DemandScenario&) const = default;
};

DemandScenario balanced_demand();    // d_b
DemandScenario imbalanced_demand();  // d_i
DemandScenario heavy_demand();       // d_h

struct RcParams {
  double systematic_delay = 1.0;
  bool operator==(const RcParams&) const = default;
};

struct TscParams {
  double phase_loss = 2.0;
  double g_min = 4.0;
  double max_cycle = 180.0;
  std::optional<double> h_sat;  // default (L + delta) / v_max
  bool operator==(const TscParams&) const = default;
};

struct FcfsParams {
  double tick = 0.1;
  bool operator==(const FcfsParams&) const = default;
};

enum class Scheme { RC, TSC, FCFS };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct VehicleRecord {
  long id = 0;
  LaneId lane;
  double arrival = 0.0;  // nominal stop-line arrival
  double entry = 0.0;    // conflict-zone entry
  double delay = 0.0;
};

struct LaneTally {
  LaneId lane;
  long arrivals = 0;
  long throughput = 0;
  long residual = 0;
};

/// Every vehicle arriving before the horizon is served to completion, so
/// records hold all of them. Throughput counts entries at or before the
/// horizon; the rest is the residual queue.
struct RunResult {
  Scheme scheme = Scheme::RC;
  std::vector<VehicleRecord> records;  // ordered by (lane index, arrival)
  std::vector<LaneTally> lanes;
  double duration = 0.0;
  double avg_delay = 0.0;
  long arrivals = 0;
  long throughput = 0;
  long residual = 0;
  /// Time average over [0, duration] of vehicles arrived but not entered.
  double mean_queue = 0.0;
  /// TSC: Webster found Y >= 1 and fell back to the maximum cycle.
  bool oversaturated = false;
  /// Post-hoc scheduler audit of this run.
  bool audit_ok = true;
  std::vector<std::string> audit_notes;
};

/// Arrival times per lane, indexed like IntersectionSpec::index. Lane
/// streams are seeded from (scenario seed, lane index) so every scheme sees
/// the same traffic.
using LaneArrivals = std::vector<std::vector<double>>;
LaneArrivals generate_arrivals(const DemandScenario& sc, const IntersectionSpec& spec);

/// FIFO per lane; each vehicle takes the earliest free slot at or after its
/// arrival. Throws InvalidParameter if the timing fails the rhythm audit.
RunResult run_rc(const DemandScenario& sc, const IntersectionSpec& spec, const RhythmTiming& timing,
                 const RcParams& p = {});
RunResult run_rc(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                 const EntrySchedule& schedule, const RcParams& p = {});

/// Four phases in order NS-through (legs 0, 2), NS-left, EW-through
/// (legs 1, 3), EW-left. Each phase is green then loses phase_loss seconds.
struct WebsterPlan {
  std::array<double, 4> y{};
  double Y = 0.0;
  double cycle = 0.0;
  std::array<double, 4> green{};
  double loss = 0.0;
  bool oversaturated = false;

  /// Start of phase i's green within the cycle.
  double green_start(int i) const;
};

WebsterPlan webster_plan(const std::array<double, 4>& y, const TscParams& p = {});
int tsc_phase(const IntersectionSpec& spec, const LaneId& id);

RunResult run_tsc(const DemandScenario& sc, const IntersectionSpec& spec, const TscParams& p = {});
RunResult run_tsc(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                  const WebsterPlan& plan, const TscParams& p = {});

/// Conflict-point reservation book. Every path is a list of (point, offset
/// after entry); a request gets the earliest tick whose crossings are at
/// least min_gap away from every reservation at each touched point.
class ReservationBook {
 public:
  ReservationBook(std::size_t points, double min_gap, double tick);

  struct Crossing {
    std::size_t point;
    double offset;
  };

  /// Grants and records the earliest tick >= earliest.
  double reserve(double earliest, const std::vector<Crossing>& path);
  const std::vector<std::vector<double>>& times() const { return times_; }
  /// Smallest separation between any two reservations at one point.
  double min_separation() const;

 private:
  double conflict_free_after(double t, const std::vector<Crossing>& path) const;

  double min_gap_;
  double tick_;
  std::vector<std::vector<double>> times_;  // sorted per point
};

RunResult run_fcfs(const DemandScenario& sc, const IntersectionSpec& spec, const RhythmTiming& timing,
                   const FcfsParams& p = {});
RunResult run_fcfs(const LaneArrivals& arrivals, double duration, const IntersectionSpec& spec,
                   const RhythmTiming& timing, const FcfsParams& p = {});

struct SchemeParams {
  RcParams rc;
  TscParams tsc;
  FcfsParams fcfs;
  bool operator==(const SchemeParams&) const = default;
};

RunResult run_scheme(Scheme s, const DemandScenario& sc, const IntersectionSpec& spec,
                     const RhythmTiming& timing, const SchemeParams& p = {});

}  // namespace rc
