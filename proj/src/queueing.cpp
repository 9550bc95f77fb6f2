#include "rc/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rc/errors.hpp"

namespace rc {

namespace {

void require_stable(double theta, double t1) {
  if (!(theta > 0.0) || !(t1 > 0.0)) throw InvalidParameter("theta and T1 must be positive");
  if (2.0 * theta * t1 >= 1.0) {
    std::ostringstream os;
    os << "unstable load: 2 theta T1 = " << 2.0 * theta * t1 << " >= 1";
    throw Unstable(os.str());
  }
}

/// Standard error of the mean from consecutive batch means.
double batch_se(const std::vector<double>& batch_means) {
  const auto n = static_cast<double>(batch_means.size());
  if (n < 2) return 0.0;
  const double m = std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / n;
  double ss = 0.0;
  for (double b : batch_means) ss += (b - m) * (b - m);
  return std::sqrt(ss / (n - 1) / n);
}

}  // namespace

double ArrivalDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) m += static_cast<double>(i) * probs[i];
  return m;
}

double ArrivalDistribution::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) m += static_cast<double>(i * i) * probs[i];
  return m;
}

void ArrivalDistribution::validate(double tol) const {
  if (probs.empty()) throw InvalidParameter("arrival distribution is empty");
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvalidParameter("arrival probabilities must be non-negative");
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > tol) throw InvalidParameter("arrival probabilities must sum to 1");
  if (std::abs(mean() - load()) > tol) {
    throw InvalidParameter("mean arrivals per interval must equal 2 theta T1");
  }
}

ArrivalDistribution ArrivalDistribution::poisson(double theta, double t1) {
  if (!(theta > 0.0) || !(t1 > 0.0)) throw InvalidParameter("theta and T1 must be positive");
  ArrivalDistribution a;
  a.theta = theta;
  a.t1 = t1;
  const double mu = 2.0 * theta * t1;
  double p = std::exp(-mu);
  for (int i = 0;; ++i) {
    if (i > 0) p *= mu / i;
    if (p < 1e-16 && static_cast<double>(i) > mu) break;
    a.probs.push_back(p);
  }
  return a;
}

ArrivalDistribution ArrivalDistribution::from_probs(std::vector<double> probs, double t1) {
  if (!(t1 > 0.0)) throw InvalidParameter("T1 must be positive");
  ArrivalDistribution a;
  a.t1 = t1;
  a.probs = std::move(probs);
  a.theta = a.mean() / (2.0 * t1);
  a.validate();
  return a;
}

SteadyState steady_state(const ArrivalDistribution& a, double tol, std::size_t n_max) {
  require_stable(a.theta, a.t1);
  const auto& P = a.probs;
  if (P.empty() || !(P[0] > 0.0)) throw InvalidParameter("P_0 must be positive");
  if (n_max < 10) throw InvalidParameter("truncation must be at least 10");

  // Tail sums, accumulated from the small end for accuracy.
  const std::size_t S = P.size();
  std::vector<double> tail(S, 0.0);  // tail[k] = sum_{b>k} P_b
  for (std::size_t k = S - 1; k-- > 0;) tail[k] = tail[k + 1] + P[k + 1];
  auto pbar = [&](std::size_t k) { return k < S ? tail[k] : 0.0; };

  SteadyState s;
  s.probs.push_back(1.0 - a.load());
  double sum = s.probs[0];
  for (std::size_t i = 0; i < n_max; ++i) {
    double flow = s.probs[0] * pbar(i);
    const std::size_t j_lo = (i + 2 > S) ? i + 2 - S : 1;
    for (std::size_t j = std::max<std::size_t>(j_lo, 1); j <= i; ++j) flow += s.probs[j] * pbar(i - j + 1);
    const double next = flow / P[0];
    s.probs.push_back(next);
    sum += next;
    if (i + 1 >= 10 && std::abs(1.0 - sum) < tol) break;
  }
  s.truncation = s.probs.size() - 1;
  s.residual = std::abs(1.0 - sum);
  s.converged = s.residual < tol;
  s.balance_residual = balance_residual(a, s.probs);
  return s;
}

std::vector<double> steady_state_forward(const ArrivalDistribution& a, std::size_t n) {
  require_stable(a.theta, a.t1);
  auto P = [&](std::size_t i) { return i < a.probs.size() ? a.probs[i] : 0.0; };
  if (!(P(0) > 0.0)) throw InvalidParameter("P_0 must be positive");
  std::vector<double> p{1.0 - a.load()};
  if (n >= 1) p.push_back((1.0 - P(0)) / P(0) * p[0]);
  if (n >= 2) p.push_back((1.0 - P(0) - P(1)) / (P(0) * P(0)) * p[0]);
  for (std::size_t i = 2; i < n; ++i) {
    double acc = (1.0 - P(1)) * p[i] - P(i) * p[0];
    for (std::size_t j = 1; j + 1 <= i; ++j) acc -= P(i + 1 - j) * p[j];
    p.push_back(acc / P(0));
  }
  return p;
}

double balance_residual(const ArrivalDistribution& a, const std::vector<double>& p) {
  auto P = [&](std::size_t i) { return i < a.probs.size() ? a.probs[i] : 0.0; };
  const std::size_t N = p.size() - 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double rhs = p[0] * P(i);
    const std::size_t S = a.probs.size();
    const std::size_t j_lo = (i + 1 >= S) ? i + 2 - S : 1;
    for (std::size_t j = std::max<std::size_t>(j_lo, 1); j <= std::min(i + 1, N); ++j) {
      rhs += p[j] * P(i - j + 1);
    }
    worst = std::max(worst, std::abs(p[i] - rhs));
  }
  return worst;
}

std::string to_string(DelayMethod m) {
  switch (m) {
    case DelayMethod::Recurrence: return "recurrence";
    case DelayMethod::PoissonClosedForm: return "poisson_closed_form";
    case DelayMethod::Bound: return "bound";
    case DelayMethod::Simulation: return "simulation";
  }
  return "unknown";
}

DelayEstimate average_delay(const SteadyState& s, double theta, double t1) {
  require_stable(theta, t1);
  double excess = 0.0;  // sum (n - 1) p_n
  double queue = 0.0;   // sum (n - 1/2) p_n
  for (std::size_t n = 1; n < s.probs.size(); ++n) {
    excess += static_cast<double>(n - 1) * s.probs[n];
    queue += (static_cast<double>(n) - 0.5) * s.probs[n];
  }
  DelayEstimate d;
  d.mean_delay = t1 + excess / theta;
  d.mean_queue = queue;
  d.method = DelayMethod::Recurrence;
  return d;
}

double poisson_delay(double theta, double t1) {
  require_stable(theta, t1);
  return t1 / (1.0 - 2.0 * theta * t1);
}

double delay_bound(double theta, double t1) {
  require_stable(theta, t1);
  return t1 + t1 / (1.0 - 2.0 * theta * t1);
}

double admissible_rate(const VehicleParams& v) { return 1.0 / (2.0 * min_gap_T(v)); }

double lee_vacation_wait(double lambda, double mu, double vacation) {
  if (lambda < 0.0 || !(mu > 0.0) || vacation < 0.0) {
    throw InvalidParameter("need lambda >= 0, mu > 0, vacation >= 0");
  }
  if (lambda / mu >= 1.0 || lambda * vacation >= 1.0) {
    throw Unstable("vacation queue requires lambda/mu < 1 and lambda*v < 1");
  }
  return (lambda / (mu * mu)) / (2.0 * (1.0 - lambda / mu)) + vacation / 2.0;
}

DelayEstimate simulate_chain(const ArrivalDistribution& a, std::uint64_t steps, std::uint64_t seed,
                             std::uint64_t burn_in, int batches) {
  require_stable(a.theta, a.t1);
  if (batches < 2 || steps < static_cast<std::uint64_t>(batches)) {
    throw InvalidParameter("need at least two batches and one step per batch");
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<long> arrivals(a.probs.begin(), a.probs.end());
  long w = 0;
  for (std::uint64_t k = 0; k < burn_in; ++k) w = w - std::min(w, 1L) + arrivals(rng);

  const std::uint64_t per_batch = steps / static_cast<std::uint64_t>(batches);
  std::vector<double> means;
  double total = 0.0;
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < per_batch; ++k) {
      // Average of the queue right before and right after the entry point.
      acc += w > 0 ? static_cast<double>(w) - 0.5 : 0.0;
      w = w - std::min(w, 1L) + arrivals(rng);
    }
    means.push_back(acc / static_cast<double>(per_batch) / a.theta);
    total += acc;
  }
  DelayEstimate d;
  d.mean_queue = total / static_cast<double>(per_batch * static_cast<std::uint64_t>(batches));
  d.mean_delay = d.mean_queue / a.theta;
  d.std_error = batch_se(means);
  d.method = DelayMethod::Simulation;
  return d;
}

LaneSimulation simulate_poisson_lane(double theta, double t1, std::uint64_t vehicles,
                                     std::uint64_t seed, int batches) {
  require_stable(theta, t1);
  if (batches < 2 || vehicles < static_cast<std::uint64_t>(batches)) {
    throw InvalidParameter("need at least two batches and one vehicle per batch");
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(theta);
  const double period = 2.0 * t1;
  const std::uint64_t per_batch = vehicles / static_cast<std::uint64_t>(batches);

  // Warm up for as many vehicles as one batch.
  double t = 0.0;
  double last_slot = -period;
  auto next_delay = [&]() {
    t += gap(rng);
    const double slot = std::max(std::ceil(t / period) * period, last_slot + period);
    last_slot = slot;
    return slot - t;
  };
  for (std::uint64_t k = 0; k < per_batch; ++k) next_delay();

  std::vector<double> means;
  double total = 0.0;
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < per_batch; ++k) acc += next_delay();
    means.push_back(acc / static_cast<double>(per_batch));
    total += acc;
  }
  LaneSimulation out;
  out.vehicles = per_batch * static_cast<std::uint64_t>(batches);
  out.mean_delay = total / static_cast<double>(out.vehicles);
  out.std_error = batch_se(means);
  return out;
}

}  // namespace rc
