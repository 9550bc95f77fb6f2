#include "rc/arrivals.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

double headway_shift(const VehicleParams& v) { return (v.length + v.min_gap) / v.v_max; }

void BurstTemplate::validate() const {
  if (!(period > 0.0) || !(burst >= 0.0) || burst > period) {
    throw InvalidParameter("burst template needs 0 <= burst <= period and period > 0");
  }
  if (!(ratio > 0.0)) throw InvalidParameter("burst intensity ratio must be positive");
}

double BurstTemplate::mild_rate(double r) const {
  return r * period / (burst * ratio + (period - burst));
}

namespace {

void check_rate(double rate, double shift) {
  if (!(rate >= 0.0) || !(shift >= 0.0)) throw InvalidParameter("rate and shift must be non-negative");
  if (rate > 0.0 && 1.0 / rate <= shift) {
    std::ostringstream os;
    os << "infeasible rate " << rate << " veh/s: mean headway " << 1.0 / rate
       << " s is not above the minimum headway " << shift << " s";
    throw InvalidParameter(os.str());
  }
}

}  // namespace

std::vector<double> gen_stationary(double rate, double duration, std::uint64_t seed, double shift) {
  check_rate(rate, shift);
  std::vector<double> out;
  if (rate == 0.0 || !(duration > 0.0)) return out;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> excess(1.0 / (1.0 / rate - shift));
  // Start in equilibrium-ish: first arrival after one excess draw.
  double t = excess(rng);
  while (t < duration) {
    out.push_back(t);
    t += shift + excess(rng);
  }
  return out;
}

std::vector<double> gen_nonstationary(double rate, double duration, std::uint64_t seed, double shift,
                                      const BurstTemplate& tpl) {
  tpl.validate();
  const double mild = tpl.mild_rate(rate);
  const double high = tpl.ratio * mild;
  check_rate(mild, shift);
  check_rate(high, shift);
  std::vector<double> out;
  if (rate == 0.0 || !(duration > 0.0)) return out;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit(1.0);
  // Phase containing t and the time that phase ends.
  auto phase = [&](double t, double& end) {
    const double base = std::floor(t / tpl.period) * tpl.period;
    if (t - base < tpl.burst) {
      end = base + tpl.burst;
      return high;
    }
    end = base + tpl.period;
    return mild;
  };

  double t = 0.0;
  double floor_t = 0.0;  // end of the deterministic shift after the last arrival
  bool first = true;
  while (true) {
    t = first ? 0.0 : floor_t;
    first = false;
    // Consume exponential time at the rate of whichever phase we are in.
    double e = unit(rng);
    while (true) {
      double end = 0.0;
      const double r = phase(t, end);
      const double mean_excess = 1.0 / r - shift;
      if (t + e * mean_excess < end) {
        t += e * mean_excess;
        break;
      }
      e -= (end - t) / mean_excess;
      t = end;
      if (t >= duration) break;
    }
    if (t >= duration) break;
    out.push_back(t);
    floor_t = t + shift;
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rc
