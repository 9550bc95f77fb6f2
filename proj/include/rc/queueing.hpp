#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rc/geometry.hpp"

namespace rc {

/// Number of arrivals per entry interval of length 2 T1.
struct ArrivalDistribution {
  double theta = 0.0;  // veh/s
  double t1 = 0.0;
  std::vector<double> probs;  // P_i, i = 0..size-1, zero beyond

  double load() const { return 2.0 * theta * t1; }  // mean arrivals per interval
  double mean() const;
  double second_moment() const;

  /// Checks normalization and the mean identity sum i P_i = 2 theta T1.
  void validate(double tol = 1e-9) const;

  /// Poisson counts with mean 2 theta T1, tail cut where P_i < 1e-16.
  static ArrivalDistribution poisson(double theta, double t1);
  /// Arbitrary counts; theta follows from the mean.
  static ArrivalDistribution from_probs(std::vector<double> probs, double t1);
};

struct SteadyState {
  std::vector<double> probs;  // p_0..p_N
  std::size_t truncation = 0;
  double residual = 0.0;          // |1 - sum p_i|
  double balance_residual = 0.0;  // max_i |p_i - sum_j p_j pi_ij|, i < N
  bool converged = false;
};

/// Stationary queue length right before an entry point. p_0 = 1 - 2 theta T1;
/// later terms come from the level-crossing balance
///   p_{i+1} P_0 = p_0 Pbar_i + sum_{j=1..i} p_j Pbar_{i-j+1},  Pbar_k = sum_{b>k} P_b,
/// which is algebraically the forward recurrence but free of cancellation.
/// N grows until residual < tol or N = n_max.
SteadyState steady_state(const ArrivalDistribution& a, double tol = 1e-10,
                         std::size_t n_max = 100000);

/// The forward recurrence exactly as written, for small N only (it loses
/// precision geometrically).
std::vector<double> steady_state_forward(const ArrivalDistribution& a, std::size_t n);

/// Largest |p_i - sum_j p_j pi_ij| over i < N for a truncated state.
double balance_residual(const ArrivalDistribution& a, const std::vector<double>& p);

enum class DelayMethod { Recurrence, PoissonClosedForm, Bound, Simulation };

std::string to_string(DelayMethod m);

struct DelayEstimate {
  double mean_delay = 0.0;  // s
  double mean_queue = 0.0;  // veh
  double std_error = 0.0;   // simulation only
  DelayMethod method = DelayMethod::Recurrence;
};

/// T1 + (1/theta) sum_{n>=1} (n-1) p_n; queue averaged over the two
/// half-steps around each entry point.
DelayEstimate average_delay(const SteadyState& s, double theta, double t1);

double poisson_delay(double theta, double t1);
/// Valid only when at most two vehicles arrive per interval.
double delay_bound(double theta, double t1);
/// 1 / (2 T1) in veh/s.
double admissible_rate(const VehicleParams& v);
/// M/D/1 with vacations; requires lambda/mu < 1 and lambda*v < 1.
double lee_vacation_wait(double lambda, double mu, double vacation);

/// Monte-Carlo run of w_{k+1} = w_k - min(w_k, 1) + lambda_k with
/// batch-means standard error.
DelayEstimate simulate_chain(const ArrivalDistribution& a, std::uint64_t steps, std::uint64_t seed,
                             std::uint64_t burn_in = 10000, int batches = 100);

/// Per-vehicle simulation of one RC lane: Poisson arrivals at rate theta,
/// entry slots every 2 T1, FIFO with one vehicle per slot. Delay is slot
/// minus arrival time.
struct LaneSimulation {
  double mean_delay = 0.0;
  double std_error = 0.0;
  std::uint64_t vehicles = 0;
};

LaneSimulation simulate_poisson_lane(double theta, double t1, std::uint64_t vehicles,
                                     std::uint64_t seed, int batches = 100);

}  // namespace rc
