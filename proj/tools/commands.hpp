#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rc/config.hpp"

namespace rctool {

/// Stable exit-code contract.
enum Exit : int { kOk = 0, kAuditFail = 1, kConfigError = 2, kRuntimeError = 3 };

struct Context {
  rc::Config config;
  std::string out_dir = ".";
  std::string provenance;  // "config_hash=... seed=..."
  int jobs = 1;
  std::optional<std::string> scheme;  // simulate only
};

int cmd_rhythm(const Context& ctx);
int cmd_audit(const Context& ctx);
int cmd_analyze(const Context& ctx);
int cmd_traj(const Context& ctx);
int cmd_simulate(const Context& ctx);
int cmd_sweep(const Context& ctx);

}  // namespace rctool
