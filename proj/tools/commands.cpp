#include "commands.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>

#include "rc/arrivals.hpp"
#include "rc/csv.hpp"
#include "rc/queueing.hpp"
#include "rc/rhythm.hpp"
#include "rc/simulator.hpp"
#include "rc/sweep.hpp"
#include "rc/trajectory.hpp"

namespace rctool {

using namespace rc;

namespace {

std::string out_path(const Context& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

std::string prov(const Context& ctx, const std::string& cmd) { return "rctool " + cmd + " " + ctx.provenance; }

const char* kind_name(const IntersectionSpec& spec, const LaneId& id) {
  return spec.kind(id.lane) == LaneKind::Through ? "through" : "left";
}

}  // namespace

int cmd_rhythm(const Context& ctx) {
  const auto spec = ctx.config.spec();
  const auto timing = ctx.config.timing();
  const auto sched = entry_schedule(spec, timing);

  std::cout << std::setprecision(6) << "T1 = " << timing.t1 << " s, T2 = " << timing.t2 << " s, T3 = "
            << timing.t3 << " s, T4 = " << timing.t4 << " s";
  for (std::size_t j = 0; j < timing.t5.size(); ++j) std::cout << ", T5[" << j << "] = " << timing.t5[j] << " s";
  std::cout << "\nperiod 2T1 = " << sched.period() << " s\n";

  CsvWriter table(out_path(ctx, "rhythm_schedule.csv"), prov(ctx, "rhythm"),
                  {"leg", "lane", "kind", "virtual", "disabled", "offset_s", "period_s"});
  for (const auto& ls : sched.lanes) {
    table.row({std::to_string(ls.lane.leg), std::to_string(ls.lane.lane), kind_name(spec, ls.lane),
               spec.is_virtual(ls.lane) ? "1" : "0", spec.is_disabled(ls.lane) ? "1" : "0", fmt(ls.offset),
               fmt(ls.period)});
  }

  // A lane owns right of way for T1 around each scheduled entry.
  const double res = timing.t1 / 8.0;
  const auto profile = row_profile(sched, 10.0 * sched.period(), res, timing.t1);
  CsvWriter row(out_path(ctx, "row_profile.csv"), prov(ctx, "rhythm"), {"t_s", "lanes_with_row"});
  for (std::size_t i = 0; i < profile.size(); ++i) {
    row.row({fmt(static_cast<double>(i) * res), std::to_string(profile[i])});
  }
  std::cout << "wrote " << table.path() << " and " << row.path() << "\n";
  return kOk;
}

int cmd_audit(const Context& ctx) {
  const auto spec = ctx.config.spec();
  const auto timing = ctx.config.timing();
  const auto rep = audit(spec, timing, 200);
  std::cout << format_report(rep);
  CsvWriter w(out_path(ctx, "audit.csv"), prov(ctx, "audit"),
              {"point", "type", "lane_a", "lane_b", "min_headway_s", "odd_multiple", "routes_agree", "pass"});
  for (const auto& p : rep.points) {
    w.row({std::to_string(p.point.id), std::string(1, to_char(p.point.type)), to_string(p.point.lane_a),
           to_string(p.point.lane_b), fmt(p.min_headway), p.odd_multiple ? "1" : "0",
           p.routes_agree ? "1" : "0", p.pass ? "1" : "0"});
  }
  return rep.pass ? kOk : kAuditFail;
}

int cmd_analyze(const Context& ctx) {
  const double t1 = min_gap_T(ctx.config.vehicle);
  auto thetas = ctx.config.analyze.thetas;
  if (thetas.empty()) {
    for (int k = 1; k <= 12; ++k) thetas.push_back(0.05 * k);
  }
  CsvWriter w(out_path(ctx, "analyze.csv"), prov(ctx, "analyze"),
              {"theta_veh_s", "load_2thetaT1", "stable", "p0", "delay_recurrence_s", "delay_closed_form_s",
               "delay_bound_s", "mean_queue_veh", "truncation"});
  std::cout << "T1 = " << t1 << " s, admissible rate " << admissible_rate(ctx.config.vehicle) << " veh/s\n";
  for (double th : thetas) {
    const double load = 2.0 * th * t1;
    if (load >= 1.0) {
      w.row({fmt(th), fmt(load), "0", "", "", "", "", "", ""});
      continue;
    }
    const auto a = ArrivalDistribution::poisson(th, t1);
    const auto s = steady_state(a);
    const auto d = average_delay(s, th, t1);
    w.row({fmt(th), fmt(load), "1", fmt(s.probs[0]), fmt(d.mean_delay), fmt(poisson_delay(th, t1)),
           fmt(delay_bound(th, t1)), fmt(d.mean_queue), std::to_string(s.truncation)});
  }
  std::cout << "wrote " << w.path() << "\n";
  return kOk;
}

int cmd_traj(const Context& ctx) {
  const auto& c = ctx.config;
  const auto spec = c.spec();
  const auto sched = entry_schedule(spec, c.timing());
  const auto& lane = sched.at(spec, c.traj.lane);
  if (!lane.schedulable || !spec.is_active(c.traj.lane)) {
    throw InvalidParameter("traj lane " + to_string(c.traj.lane) + " carries no traffic");
  }
  c.zone.validate(c.vehicle);
  const double horizon = 10.0 * c.traj.vehicles / c.traj.rate + 100.0;
  auto t0s = gen_stationary(c.traj.rate, horizon, c.seed, headway_shift(c.vehicle));
  if (t0s.size() > static_cast<std::size_t>(c.traj.vehicles)) t0s.resize(static_cast<std::size_t>(c.traj.vehicles));

  std::vector<SpeedCurve> curves;
  for (double t0 : t0s) curves.push_back(assign_curve(t0, curves.empty() ? nullptr : &curves.back(), lane, c.zone, c.vehicle));

  CsvWriter w(out_path(ctx, "traj.csv"), prov(ctx, "traj"), {"vehicle", "t_s", "x_m", "v_m_s"});
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& cv = curves[i];
    const auto n = static_cast<long>(std::ceil((cv.target - cv.t0) / c.traj.step));
    for (long k = 0; k <= n; ++k) {
      const double t = std::min(cv.t0 + static_cast<double>(k) * c.traj.step, cv.target);
      w.row({std::to_string(i), fmt(t), fmt(cv.position(t)), fmt(cv.speed(t))});
    }
    if (i > 0) worst = std::min(worst, spacing_check(curves[i - 1], cv, c.vehicle));
  }
  std::cout << curves.size() << " vehicles on lane " << to_string(c.traj.lane);
  if (curves.size() > 1) std::cout << ", smallest bumper gap " << worst << " m";
  std::cout << "\nwrote " << w.path() << "\n";
  return kOk;
}

int cmd_simulate(const Context& ctx) {
  const auto& c = ctx.config;
  const Scheme scheme = ctx.scheme ? scheme_from_string(*ctx.scheme) : c.schemes.front();
  const auto spec = c.spec();
  const auto r = run_scheme(scheme, c.scenarios.front(), spec, c.timing(), c.params);
  CsvWriter w(out_path(ctx, "simulate.csv"), prov(ctx, "simulate") + " scheme=" + to_string(scheme),
              {"id", "lane", "arrival_s", "entry_s", "delay_s", "served"});
  for (const auto& v : r.records) {
    w.row({std::to_string(v.id), to_string(v.lane), fmt(v.arrival), fmt(v.entry), fmt(v.delay),
           v.entry <= r.duration + kEpsTime ? "1" : "0"});
  }
  std::cout << to_string(scheme) << " on " << c.scenarios.front().name << " alpha=" << c.scenarios.front().alpha
            << ": avg_delay " << r.avg_delay << " s, throughput " << r.throughput << ", residual "
            << r.residual << (r.oversaturated ? " (oversaturated plan)" : "") << "\n";
  if (!r.audit_ok) {
    for (const auto& n : r.audit_notes) std::cerr << "audit: " << n << "\n";
    throw Error("post-run audit failed");
  }
  std::cout << "wrote " << w.path() << "\n";
  return kOk;
}

int cmd_sweep(const Context& ctx) {
  const auto& c = ctx.config;
  SweepPlan plan;
  plan.alphas = c.alphas;
  plan.scenarios = c.scenarios;
  plan.schemes = c.schemes;
  plan.replications = c.replications;
  plan.master_seed = c.seed;
  plan.jobs = ctx.jobs;
  plan.spec = c.spec();
  plan.timing = c.timing();
  plan.params = c.params;
  const auto rows = sweep(plan);
  CsvWriter w(out_path(ctx, "sweep.csv"), prov(ctx, "sweep"),
              {"scheme", "scenario", "alpha", "replication", "avg_delay_s", "throughput_veh", "residual_queue"});
  bool ok = true;
  for (const auto& r : rows) {
    w.row({r.scheme, r.scenario, fmt(r.alpha), std::to_string(r.replication), fmt(r.avg_delay),
           std::to_string(r.throughput), std::to_string(r.residual)});
    ok = ok && r.audit_ok;
  }
  if (!ok) throw Error("a sweep run failed its post-run audit");
  std::cout << rows.size() << " runs, wrote " << w.path() << "\n";
  return kOk;
}

}  // namespace rctool
