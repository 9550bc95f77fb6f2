#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rc/csv.hpp"

int main(int argc, char** argv) {
  using namespace rctool;
  CLI::App app{"Rhythmic intersection control toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> scheme;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Sub subs[] = {
      {"rhythm", "solve travel times; write schedule table and ROW profile", cmd_rhythm},
      {"audit", "check every conflict point; exit 1 on failure", cmd_audit},
      {"analyze", "queueing delay over a theta grid", cmd_analyze},
      {"traj", "speed curves for one lane as a space-time CSV", cmd_traj},
      {"simulate", "one simulation run, per-vehicle CSV", cmd_simulate},
      {"sweep", "alpha x scenario x scheme x replication grid", cmd_sweep},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--jobs", jobs, "concurrent runs (sweep)")->check(CLI::PositiveNumber);
    if (std::string(s.name) == "simulate") sub->add_option("--scheme", scheme, "RC, TSC or FCFS");
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Context ctx;
  try {
    ctx.config = rc::load_config(config_path);
  } catch (const rc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (seed) {
    ctx.config.seed = *seed;
    for (auto& s : ctx.config.scenarios) s.seed = *seed;
  }
  ctx.out_dir = out_dir;
  ctx.jobs = jobs;
  ctx.scheme = scheme;
  ctx.provenance = "config_hash=" + rc::hex64(rc::fnv1a(rc::emit_config(ctx.config))) +
                   " seed=" + std::to_string(ctx.config.seed);

  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (!apps[i]->parsed()) continue;
    try {
      return subs[i].run(ctx);
    } catch (const rc::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kRuntimeError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kRuntimeError;
    }
  }
  return kConfigError;
}
