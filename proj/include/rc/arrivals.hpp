#pragma once

#include <cstdint>
#include <vector>

#include "rc/geometry.hpp"

namespace rc {

/// Smallest realizable same-lane headway at v_max: (L + delta) / v_max.
double headway_shift(const VehicleParams& v);

/// Periodic demand template: burst seconds at ratio times the mild rate,
/// then mild arrivals for the rest of the period.
struct BurstTemplate {
  double period = 200.0;
  double burst = 50.0;
  double ratio = 4.0;

  void validate() const;
  /// Mild rate whose time average over one period equals r.
  double mild_rate(double r) const;
  bool operator==(const BurstTemplate&) const = default;
};

/// Arrival times in [0, duration) with headways shift + Exp, mean 1/rate.
/// Throws InvalidParameter when 1/rate <= shift.
std::vector<double> gen_stationary(double rate, double duration, std::uint64_t seed, double shift);

/// Piecewise-stationary arrivals, burst first in every period. The
/// exponential part is redrawn at phase boundaries (it is memoryless), so
/// each phase runs at its own rate.
std::vector<double> gen_nonstationary(double rate, double duration, std::uint64_t seed, double shift,
                                      const BurstTemplate& tpl = {});

/// splitmix64 step; used to derive independent streams from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rc
