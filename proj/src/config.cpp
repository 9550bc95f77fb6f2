#include "rc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rc {

using nlohmann::json;

ConfigError::ConfigError(Kind kind, std::string field, int line, int column, const std::string& msg)
    : Error(msg), kind_(kind), field_(std::move(field)), line_(line), column_(column) {}

namespace {

[[noreturn]] void semantic(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Semantic, field, 0, 0, "semantic error at " + field + ": " + msg);
}

/// Walks one JSON object, remembers which keys were read and rejects the
/// rest so typos do not pass silently.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) semantic(label(), "expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double num(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) semantic(field(key), "expected a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) semantic(field(key), "expected an integer");
    return v.get<long>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) semantic(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string str(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) semantic(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array()) semantic(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) semantic(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) semantic(field(k), "unknown key");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "(root)" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

LaneId read_lane(const json& j, const std::string& path) {
  Reader r(j, path);
  LaneId id;
  id.leg = static_cast<int>(r.integer("leg", 0));
  id.lane = static_cast<int>(r.integer("lane", 1));
  r.finish();
  return id;
}

/// Rethrows module validation failures as semantic errors on a field.
template <class F>
void checked(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    semantic(field, e.what());
  }
}

void read_intersection(Reader& root, Config& c) {
  if (!root.has("intersection")) return;
  Reader r(root.raw("intersection"), "intersection");
  const bool sym = r.has("through") || r.has("left");
  if (sym && r.has("legs")) semantic("intersection", "give either through/left or legs, not both");
  if (sym) {
    const LegLanes l{static_cast<int>(r.integer("through", 1)), static_cast<int>(r.integer("left", 0))};
    c.legs = {l, l, l, l};
  } else if (r.has("legs")) {
    const auto& a = r.raw("legs");
    if (!a.is_array() || a.size() != 4) semantic("intersection.legs", "expected an array of 4 legs");
    for (std::size_t i = 0; i < 4; ++i) {
      Reader leg(a[i], "intersection.legs[" + std::to_string(i) + "]");
      c.legs[i].through = static_cast<int>(leg.integer("through", 1));
      c.legs[i].left = static_cast<int>(leg.integer("left", 0));
      leg.finish();
    }
  }
  if (r.has("disabled")) {
    const auto& a = r.raw("disabled");
    if (!a.is_array()) semantic("intersection.disabled", "expected an array of lanes");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.disabled.push_back(read_lane(a[i], "intersection.disabled[" + std::to_string(i) + "]"));
    }
  }
  r.finish();
}

void read_vehicle(Reader& root, Config& c) {
  if (!root.has("vehicle")) return;
  Reader r(root.raw("vehicle"), "vehicle");
  auto& v = c.vehicle;
  v.length = r.num("length", v.length);
  v.width = r.num("width", v.width);
  v.min_gap = r.num("min_gap", v.min_gap);
  v.v_max = r.num("v_max", v.v_max);
  v.a_max = r.num("a_max", v.a_max);
  r.finish();
}

void read_rhythm(Reader& root, Config& c) {
  if (!root.has("rhythm")) return;
  Reader r(root.raw("rhythm"), "rhythm");
  if (r.has("lengths")) {
    Reader l(r.raw("lengths"), "rhythm.lengths");
    auto& s = c.lengths;
    s.cat1 = l.num("cat1", s.cat1);
    s.cat2 = l.num("cat2", s.cat2);
    s.cat3 = l.num("cat3", s.cat3);
    s.cat4 = l.num("cat4", s.cat4);
    s.cat5 = l.numbers("cat5", s.cat5);
    l.finish();
  }
  if (r.has("band")) {
    Reader b(r.raw("band"), "rhythm.band");
    c.band.lo = b.num("lo", c.band.lo);
    c.band.hi = b.num("hi", c.band.hi);
    b.finish();
  }
  if (r.has("multiples")) {
    Reader m(r.raw("multiples"), "rhythm.multiples");
    TimingMultiples t;
    t.t2 = m.num("t2", t.t2);
    t.t3 = m.num("t3", t.t3);
    t.t4 = m.num("t4", t.t4);
    t.t5 = m.numbers("t5", t.t5);
    m.finish();
    c.multiples = t;
  }
  r.finish();
}

DemandScenario read_scenario(const json& j, const std::string& path) {
  Reader r(j, path);
  DemandScenario s;
  const std::string preset = r.str("preset", "");
  if (preset == "balanced") {
    s = balanced_demand();
  } else if (preset == "imbalanced") {
    s = imbalanced_demand();
  } else if (preset == "highly_imbalanced") {
    s = heavy_demand();
  } else if (!preset.empty()) {
    semantic(r.field("preset"), "unknown preset '" + preset + "' (balanced, imbalanced, highly_imbalanced)");
  } else if (!r.has("demand")) {
    semantic(path, "needs a preset or a demand vector");
  }
  s.name = r.str("name", s.name);
  if (r.has("demand")) {
    const auto d = r.numbers("demand", {});
    if (d.size() != 8) {
      semantic(r.field("demand"), "expected 8 entries (4 through, 4 left), got " + std::to_string(d.size()));
    }
    for (std::size_t i = 0; i < 8; ++i) {
      if (!(d[i] >= 0.0)) semantic(r.field("demand") + "[" + std::to_string(i) + "]", "must be >= 0");
      s.demand[i] = d[i];
    }
  }
  const std::string arrival = r.str("arrival", to_string(s.kind));
  if (arrival == "stationary") {
    s.kind = ArrivalKind::Stationary;
  } else if (arrival == "nonstationary") {
    s.kind = ArrivalKind::Nonstationary;
  } else {
    semantic(r.field("arrival"), "expected 'stationary' or 'nonstationary'");
  }
  if (r.has("burst")) {
    Reader b(r.raw("burst"), r.field("burst"));
    s.burst.period = b.num("period", s.burst.period);
    s.burst.burst = b.num("burst", s.burst.burst);
    s.burst.ratio = b.num("ratio", s.burst.ratio);
    b.finish();
  }
  s.duration = r.num("duration", s.duration);
  if (r.has("shift")) s.shift = r.num("shift", 0.0);
  r.finish();
  checked(path, [&] { s.validate(); });
  return s;
}

void read_schemes(Reader& root, Config& c) {
  if (root.has("schemes")) {
    const auto& a = root.raw("schemes");
    if (!a.is_array() || a.empty()) semantic("schemes", "expected a non-empty array of names");
    c.schemes.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "schemes[" + std::to_string(i) + "]";
      if (!a[i].is_string()) semantic(f, "expected a scheme name");
      checked(f, [&] { c.schemes.push_back(scheme_from_string(a[i].get<std::string>())); });
    }
  }
  if (root.has("rc")) {
    Reader r(root.raw("rc"), "rc");
    c.params.rc.systematic_delay = r.num("systematic_delay", c.params.rc.systematic_delay);
    r.finish();
  }
  if (root.has("tsc")) {
    Reader r(root.raw("tsc"), "tsc");
    auto& t = c.params.tsc;
    t.phase_loss = r.num("phase_loss", t.phase_loss);
    t.g_min = r.num("g_min", t.g_min);
    t.max_cycle = r.num("max_cycle", t.max_cycle);
    if (r.has("h_sat")) t.h_sat = r.num("h_sat", 0.0);
    r.finish();
    if (!(t.phase_loss >= 0.0)) semantic("tsc.phase_loss", "must be >= 0");
    if (!(t.g_min > 0.0)) semantic("tsc.g_min", "must be > 0");
    if (!(t.max_cycle >= 4 * t.g_min + 4 * t.phase_loss)) {
      semantic("tsc.max_cycle", "must cover four minimum greens plus phase losses");
    }
    if (t.h_sat && !(*t.h_sat > 0.0)) semantic("tsc.h_sat", "must be > 0");
  }
  if (root.has("fcfs")) {
    Reader r(root.raw("fcfs"), "fcfs");
    c.params.fcfs.tick = r.num("tick", c.params.fcfs.tick);
    r.finish();
    if (!(c.params.fcfs.tick > 0.0)) semantic("fcfs.tick", "must be > 0");
  }
}

void validate(const Config& c) {
  IntersectionSpec spec;
  checked("intersection", [&] { spec = c.spec(); });
  checked("vehicle", [&] { c.vehicle.validate(); });
  checked("zone.length", [&] { c.zone.validate(c.vehicle); });
  if (!(c.band.lo > 0.0) || !(c.band.lo < c.band.hi)) semantic("rhythm.band", "needs 0 < lo < hi");
  if (!c.lengths.cat5.empty() && c.lengths.cat5.size() != static_cast<std::size_t>(spec.left_lanes())) {
    semantic("rhythm.lengths.cat5", "needs one entry per left lane (" + std::to_string(spec.left_lanes()) + ")");
  }
  if (c.multiples && c.multiples->t5.size() != static_cast<std::size_t>(spec.left_lanes())) {
    semantic("rhythm.multiples.t5", "needs one entry per left lane (" + std::to_string(spec.left_lanes()) + ")");
  }
  if (c.alphas.empty()) semantic("alphas", "must not be empty");
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    if (!(c.alphas[i] >= 0.0)) semantic("alphas[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (c.scenarios.empty()) semantic("scenarios", "must not be empty");
  if (c.replications < 1) semantic("replications", "must be >= 1");
  for (std::size_t i = 0; i < c.analyze.thetas.size(); ++i) {
    if (!(c.analyze.thetas[i] > 0.0)) semantic("analyze.thetas[" + std::to_string(i) + "]", "must be > 0");
  }
  if (!spec.contains(c.traj.lane)) semantic("traj.lane", "no such lane " + to_string(c.traj.lane));
  if (c.traj.vehicles < 1) semantic("traj.vehicles", "must be >= 1");
  if (!(c.traj.rate > 0.0)) semantic("traj.rate", "must be > 0");
  if (!(c.traj.step > 0.0)) semantic("traj.step", "must be > 0");
}

}  // namespace

IntersectionSpec Config::spec() const {
  auto s = virtualize(legs, vehicle);
  for (const auto& id : disabled) {
    if (!s.contains(id)) throw InvalidParameter("disabled lane " + to_string(id) + " does not exist");
    s.set_disabled(id);
  }
  return s;
}

RhythmTiming Config::timing() const {
  if (multiples) {
    return timing_from_multiples(min_gap_T(vehicle), multiples->t2, multiples->t3, multiples->t4,
                                 multiples->t5);
  }
  return solve_travel_times(spec(), lengths, band);
}

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    int col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(ConfigError::Kind::Syntax, "", line, col, os.str());
  }

  Config c;
  Reader root(j, "");
  read_intersection(root, c);
  read_vehicle(root, c);
  read_rhythm(root, c);
  if (root.has("zone")) {
    Reader z(root.raw("zone"), "zone");
    c.zone.length = z.num("length", c.zone.length);
    z.finish();
  }
  if (root.has("alpha") && root.has("alphas")) semantic("alpha", "give either alpha or alphas");
  if (root.has("alpha")) c.alphas = {root.num("alpha", 1.0)};
  c.alphas = root.numbers("alphas", c.alphas);
  c.replications = static_cast<int>(root.integer("replications", c.replications));
  c.seed = root.unsigned_int("seed", c.seed);
  if (root.has("scenarios")) {
    const auto& a = root.raw("scenarios");
    if (!a.is_array()) semantic("scenarios", "expected an array");
    c.scenarios.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.scenarios.push_back(read_scenario(a[i], "scenarios[" + std::to_string(i) + "]"));
    }
  }
  read_schemes(root, c);
  if (root.has("analyze")) {
    Reader r(root.raw("analyze"), "analyze");
    c.analyze.thetas = r.numbers("thetas", {});
    r.finish();
  }
  if (root.has("traj")) {
    Reader r(root.raw("traj"), "traj");
    if (r.has("lane")) c.traj.lane = read_lane(r.raw("lane"), "traj.lane");
    c.traj.vehicles = static_cast<int>(r.integer("vehicles", c.traj.vehicles));
    c.traj.rate = r.num("rate", c.traj.rate);
    c.traj.step = r.num("step", c.traj.step);
    r.finish();
  }
  root.finish();

  validate(c);
  for (auto& s : c.scenarios) {
    s.alpha = c.alphas.front();
    s.seed = c.seed;
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Kind::Syntax, "", 0, 0, "cannot open config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const Config& c) {
  json j = json::object();
  json legs = json::array();
  for (const auto& l : c.legs) legs.push_back({{"through", l.through}, {"left", l.left}});
  json disabled = json::array();
  for (const auto& d : c.disabled) disabled.push_back({{"leg", d.leg}, {"lane", d.lane}});
  j["intersection"] = {{"legs", legs}, {"disabled", disabled}};
  const auto& v = c.vehicle;
  j["vehicle"] = {{"length", v.length}, {"width", v.width}, {"min_gap", v.min_gap},
                  {"v_max", v.v_max},   {"a_max", v.a_max}};
  json rhythm = {{"lengths",
                  {{"cat1", c.lengths.cat1},
                   {"cat2", c.lengths.cat2},
                   {"cat3", c.lengths.cat3},
                   {"cat4", c.lengths.cat4},
                   {"cat5", c.lengths.cat5}}},
                 {"band", {{"lo", c.band.lo}, {"hi", c.band.hi}}}};
  if (c.multiples) {
    rhythm["multiples"] = {{"t2", c.multiples->t2},
                           {"t3", c.multiples->t3},
                           {"t4", c.multiples->t4},
                           {"t5", c.multiples->t5}};
  }
  j["rhythm"] = rhythm;
  j["zone"] = {{"length", c.zone.length}};
  j["alphas"] = c.alphas;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  json scen = json::array();
  for (const auto& s : c.scenarios) {
    json o = {{"name", s.name},
              {"demand", s.demand},
              {"arrival", to_string(s.kind)},
              {"burst", {{"period", s.burst.period}, {"burst", s.burst.burst}, {"ratio", s.burst.ratio}}},
              {"duration", s.duration}};
    if (s.shift) o["shift"] = *s.shift;
    scen.push_back(o);
  }
  j["scenarios"] = scen;
  json schemes = json::array();
  for (auto s : c.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  j["rc"] = {{"systematic_delay", c.params.rc.systematic_delay}};
  json tsc = {{"phase_loss", c.params.tsc.phase_loss},
              {"g_min", c.params.tsc.g_min},
              {"max_cycle", c.params.tsc.max_cycle}};
  if (c.params.tsc.h_sat) tsc["h_sat"] = *c.params.tsc.h_sat;
  j["tsc"] = tsc;
  j["fcfs"] = {{"tick", c.params.fcfs.tick}};
  j["analyze"] = {{"thetas", c.analyze.thetas}};
  j["traj"] = {{"lane", {{"leg", c.traj.lane.leg}, {"lane", c.traj.lane.lane}}},
               {"vehicles", c.traj.vehicles},
               {"rate", c.traj.rate},
               {"step", c.traj.step}};
  return j.dump(2) + "\n";
}

}  // namespace rc
