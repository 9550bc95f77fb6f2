#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rc/errors.hpp"
#include "rc/geometry.hpp"
#include "rc/rhythm.hpp"
#include "rc/simulator.hpp"
#include "rc/trajectory.hpp"

namespace rc {

/// Malformed text (kind Syntax, with line and column) or a well-formed
/// document with a bad value (kind Semantic, with the field path).
class ConfigError : public Error {
 public:
  enum class Kind { Syntax, Semantic };
  ConfigError(Kind kind, std::string field, int line, int column, const std::string& msg);

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  std::string field_;
  int line_;
  int column_;
};

/// Explicit odd/even multiples of T1 instead of solving from lengths.
struct TimingMultiples {
  double t2 = 1.0;
  double t3 = 1.0;
  double t4 = 1.0;
  std::vector<double> t5;
  bool operator==(const TimingMultiples&) const = default;
};

struct AnalyzeOptions {
  std::vector<double> thetas;  // veh/s per lane; empty means 0.05 .. 0.60
  bool operator==(const AnalyzeOptions&) const = default;
};

struct TrajOptions {
  LaneId lane{0, 1};
  int vehicles = 20;
  double rate = 0.5;   // veh/s
  double step = 0.1;   // s between CSV samples
  bool operator==(const TrajOptions&) const = default;
};

struct Config {
  std::array<LegLanes, 4> legs{LegLanes{1, 0}, LegLanes{1, 0}, LegLanes{1, 0}, LegLanes{1, 0}};
  std::vector<LaneId> disabled;
  VehicleParams vehicle;
  SegmentLengths lengths;
  SpeedBand band;
  std::optional<TimingMultiples> multiples;
  AdjustmentZone zone;
  std::vector<DemandScenario> scenarios{balanced_demand()};  // alpha comes from alphas[0]
  std::vector<double> alphas{1.0};
  std::vector<Scheme> schemes{Scheme::RC, Scheme::TSC, Scheme::FCFS};
  SchemeParams params;
  int replications = 1;
  std::uint64_t seed = 1;
  AnalyzeOptions analyze;
  TrajOptions traj;

  bool operator==(const Config&) const = default;

  IntersectionSpec spec() const;
  /// Solved from lengths and band, or built from explicit multiples.
  RhythmTiming timing() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);
/// Canonical JSON: every field written, fixed key order.
std::string emit_config(const Config& c);

}  // namespace rc
