#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rc/arrivals.hpp"
#include "rc/errors.hpp"

using namespace rc;

namespace {

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats headway_stats(const std::vector<double>& t) {
  std::vector<double> h;
  for (std::size_t i = 1; i < t.size(); ++i) h.push_back(t[i] - t[i - 1]);
  const double n = static_cast<double>(h.size());
  Stats s;
  s.mean = std::accumulate(h.begin(), h.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : h) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / (n - 1) / n);
  return s;
}

TEST(Shift, Default) { EXPECT_NEAR(headway_shift(VehicleParams{}), 0.55, 1e-15); }

TEST(Stationary, MeanHeadway) {
  const auto t = gen_stationary(0.3, 1e4, 7, 0.55);
  const auto s = headway_stats(t);
  EXPECT_NEAR(s.mean, 1.0 / 0.3, 3 * s.se);
  EXPECT_NEAR(s.mean, 3.333, 0.2);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i] - t[i - 1], 0.55 - 1e-12);
  EXPECT_LT(t.back(), 1e4);
}

TEST(Stationary, VarianceOfExcess) {
  // Excess over the shift is exponential: its sd equals its mean.
  const auto t = gen_stationary(0.5, 2e5, 8, 0.55);
  std::vector<double> x;
  for (std::size_t i = 1; i < t.size(); ++i) x.push_back(t[i] - t[i - 1] - 0.55);
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  EXPECT_NEAR(std::sqrt(ss / (n - 1)), m, 0.02 * m);
}

TEST(Stationary, DeterministicAndSeedSensitive) {
  EXPECT_EQ(gen_stationary(0.4, 1000, 3, 0.55), gen_stationary(0.4, 1000, 3, 0.55));
  EXPECT_NE(gen_stationary(0.4, 1000, 3, 0.55), gen_stationary(0.4, 1000, 4, 0.55));
}

TEST(Stationary, EdgeCases) {
  EXPECT_TRUE(gen_stationary(0.0, 1000, 1, 0.55).empty());
  EXPECT_LE(gen_stationary(1e-9, 1000, 1, 0.55).size(), 1u);
  EXPECT_THROW(gen_stationary(2.0, 10, 1, 0.55), InvalidParameter);
  EXPECT_THROW(gen_stationary(-1.0, 10, 1, 0.55), InvalidParameter);
  EXPECT_NO_THROW(gen_stationary(1.7, 10, 1, 0.55));
}

TEST(Nonstationary, MildAndBurstRates) {
  const BurstTemplate tpl;
  EXPECT_NEAR(tpl.mild_rate(0.35), 0.2, 1e-15);
  EXPECT_NEAR(tpl.ratio * tpl.mild_rate(0.35), 0.8, 1e-15);
  // Time average over one period returns r.
  EXPECT_NEAR((50 * 0.8 + 150 * 0.2) / 200, 0.35, 1e-15);
}

TEST(Nonstationary, PerPhaseRates) {
  const double dur = 1e5;
  const auto t = gen_nonstationary(0.35, dur, 21, 0.55);
  const int cycles = static_cast<int>(dur / 200);
  std::vector<double> burst(cycles, 0.0), mild(cycles, 0.0);
  for (double x : t) {
    const int c = static_cast<int>(x / 200);
    (std::fmod(x, 200.0) < 50.0 ? burst : mild)[c] += 1.0;
  }
  auto check = [&](const std::vector<double>& counts, double secs, double rate) {
    const double n = counts.size();
    const double m = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
    double ss = 0.0;
    for (double c : counts) ss += (c - m) * (c - m);
    const double se = std::sqrt(ss / (n - 1) / n);
    EXPECT_NEAR(m / secs, rate, 3 * se / secs) << rate;
  };
  check(burst, 50.0, 0.8);
  check(mild, 150.0, 0.2);
  EXPECT_NEAR(t.size() / dur, 0.35, 0.01);
}

TEST(Nonstationary, RatioOneMatchesStationary) {
  BurstTemplate flat;
  flat.ratio = 1.0;
  EXPECT_NEAR(flat.mild_rate(0.4), 0.4, 1e-15);
  const auto s = headway_stats(gen_nonstationary(0.4, 1e5, 5, 0.55, flat));
  EXPECT_NEAR(s.mean, 2.5, 3 * s.se);
}

TEST(Nonstationary, InfeasibleBurst) {
  // Mild 0.6 gives a burst of 2.4 veh/s, above 1/0.55.
  EXPECT_THROW(gen_nonstationary(1.05, 100, 1, 0.55), InvalidParameter);
  BurstTemplate bad;
  bad.burst = 300;
  EXPECT_THROW(gen_nonstationary(0.1, 100, 1, 0.55, bad), InvalidParameter);
  EXPECT_EQ(gen_nonstationary(0.3, 500, 9, 0.55), gen_nonstationary(0.3, 500, 9, 0.55));
}

TEST(MixSeed, StreamsDiffer) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(5, 3), mix_seed(5, 3));
}

}  // namespace
