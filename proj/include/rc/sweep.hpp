#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rc/simulator.hpp"

namespace rc {

struct SweepRow {
  std::string scheme;
  std::string scenario;
  double alpha = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  double avg_delay = 0.0;
  long throughput = 0;
  long residual = 0;
  bool audit_ok = true;
};

/// Scenario alphas and seeds are overridden per run. The seed of a run is
/// mix_seed(master_seed, run index) where the index enumerates
/// (scenario, alpha, replication); schemes share it, so they are compared
/// on the same arrivals.
struct SweepPlan {
  std::vector<double> alphas;
  std::vector<DemandScenario> scenarios;
  std::vector<Scheme> schemes;
  int replications = 1;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  IntersectionSpec spec;
  RhythmTiming timing;
  SchemeParams params;

  void validate() const;
  std::size_t size() const { return alphas.size() * scenarios.size() * schemes.size() * replications; }
};

/// Rows in plan order: scenario, alpha, scheme, replication. Identical for
/// any job count.
std::vector<SweepRow> sweep(const SweepPlan& plan);

/// Mean over replications of one (scheme, scenario, alpha) cell.
struct SweepCell {
  std::string scheme;
  std::string scenario;
  double alpha = 0.0;
  double avg_delay = 0.0;
  double throughput = 0.0;
  double residual = 0.0;
};

std::vector<SweepCell> aggregate(const std::vector<SweepRow>& rows);

}  // namespace rc
