#include "rc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "rc/errors.hpp"

namespace rc {

void SweepPlan::validate() const {
  if (alphas.empty() || scenarios.empty() || schemes.empty()) {
    throw InvalidParameter("sweep needs at least one alpha, scenario and scheme");
  }
  if (replications < 1) throw InvalidParameter("replications must be at least 1");
  if (jobs < 1) throw InvalidParameter("jobs must be at least 1");
  for (const auto& s : scenarios) s.validate();
}

std::vector<SweepRow> sweep(const SweepPlan& plan) {
  plan.validate();
  const std::size_t n_alpha = plan.alphas.size();
  const std::size_t n_scheme = plan.schemes.size();
  const auto n_rep = static_cast<std::size_t>(plan.replications);
  std::vector<SweepRow> rows(plan.size());

  auto run_one = [&](std::size_t i) {
    const std::size_t rep = i % n_rep;
    const std::size_t scheme = (i / n_rep) % n_scheme;
    const std::size_t alpha = (i / n_rep / n_scheme) % n_alpha;
    const std::size_t scen = i / n_rep / n_scheme / n_alpha;
    const std::uint64_t run_index = (scen * n_alpha + alpha) * n_rep + rep;

    DemandScenario sc = plan.scenarios[scen];
    sc.alpha = plan.alphas[alpha];
    sc.seed = mix_seed(plan.master_seed, run_index);
    const Scheme s = plan.schemes[scheme];
    const auto r = run_scheme(s, sc, plan.spec, plan.timing, plan.params);

    auto& row = rows[i];
    row.scheme = to_string(s);
    row.scenario = sc.name;
    row.alpha = sc.alpha;
    row.replication = static_cast<int>(rep);
    row.seed = sc.seed;
    row.avg_delay = r.avg_delay;
    row.throughput = r.throughput;
    row.residual = r.residual;
    row.audit_ok = r.audit_ok;
  };

  // Runs share nothing mutable; each writes its own row.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        run_one(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = rows.size();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::min<std::size_t>(plan.jobs, rows.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SweepCell> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepCell> out;
  std::map<std::tuple<std::string, std::string, double>, std::pair<std::size_t, int>> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.scheme, r.scenario, r.alpha);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, std::make_pair(out.size(), 0)).first;
      out.push_back(SweepCell{r.scheme, r.scenario, r.alpha, 0.0, 0.0, 0.0});
    }
    auto& c = out[it->second.first];
    c.avg_delay += r.avg_delay;
    c.throughput += static_cast<double>(r.throughput);
    c.residual += static_cast<double>(r.residual);
    ++it->second.second;
  }
  for (const auto& [key, slot] : index) {
    auto& c = out[slot.first];
    c.avg_delay /= slot.second;
    c.throughput /= slot.second;
    c.residual /= slot.second;
  }
  return out;
}

}  // namespace rc
