#include "rdc/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "rdc/errors.hpp"

namespace rdc::config {

using nlohmann::json;

double ControlValue::resolve(const ReactionModel& model) const {
  return theta ? model.theta() : value;
}

ReactionModel ModelSpec::build() const {
  if (kind == "logistic") return ReactionModel::logistic();
  if (kind == "cubic") return ReactionModel::cubic(theta);
  throw ConfigError("model.kind must be \"logistic\" or \"cubic\", got \"" + kind + "\"");
}

Field InitialData::sample(double length, std::size_t intervals) const {
  if (kind == "ramp") return Field::ramp(length, intervals);
  if (kind == "constant") return Field::constant(length, intervals, value);
  if (kind == "linear") {
    const double a = left, b = right;
    return Field::sample(length, intervals, [=](double x) { return a + (b - a) * x / length; });
  }
  throw ConfigError("y0.kind must be ramp, constant or linear");
}

namespace {

// 1-based line of the first occurrence of "key" in text, 0 if absent.
std::size_t locate(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
}

struct Reader {
  const std::string& text;
  const std::string& source;

  [[noreturn]] void fail(const std::string& path, const std::string& leaf,
                         const std::string& msg) const {
    const std::size_t line = locate(text, leaf);
    if (line > 0) throw ConfigError(fmt::format("{}:{}: {}: {}", source, line, path, msg));
    throw ConfigError(fmt::format("{}: {}: {}", source, path, msg));
  }

  void keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.contains(k)) {
        fail(path.empty() ? k : path + "." + k, k, "unknown key \"" + k + "\"");
      }
    }
  }

  static std::string join(const std::string& path, const std::string& k) {
    return path.empty() ? k : path + "." + k;
  }

  void number(const json& obj, const std::string& path, const std::string& k, double& out,
              double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity()) const {
    if (!obj.contains(k)) return;
    const json& v = obj.at(k);
    if (!v.is_number()) fail(join(path, k), k, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi) {
      fail(join(path, k), k, fmt::format("value {} outside [{}, {}]", x, lo, hi));
    }
    out = x;
  }

  void positive(const json& obj, const std::string& path, const std::string& k,
                double& out) const {
    number(obj, path, k, out);
    if (obj.contains(k) && !(out > 0.0)) fail(join(path, k), k, "must be positive");
  }

  void count(const json& obj, const std::string& path, const std::string& k, std::size_t& out,
             std::size_t lo = 1) const {
    if (!obj.contains(k)) return;
    const json& v = obj.at(k);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(lo)) {
      fail(join(path, k), k, fmt::format("expected an integer >= {}", lo));
    }
    out = v.get<std::size_t>();
  }

  void flag(const json& obj, const std::string& path, const std::string& k, bool& out) const {
    if (!obj.contains(k)) return;
    if (!obj.at(k).is_boolean()) fail(join(path, k), k, "expected true or false");
    out = obj.at(k).get<bool>();
  }

  void string(const json& obj, const std::string& path, const std::string& k,
              std::string& out) const {
    if (!obj.contains(k)) return;
    if (!obj.at(k).is_string()) fail(join(path, k), k, "expected a string");
    out = obj.at(k).get<std::string>();
  }

  ControlValue control(const json& v, const std::string& path, const std::string& k) const {
    ControlValue c;
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "theta") {
        c.theta = true;
        return c;
      }
      if (s == "zero") return c;
      fail(path, k, "expected a number in [0, 1], \"theta\" or \"zero\"");
    }
    if (!v.is_number()) fail(path, k, "expected a number in [0, 1], \"theta\" or \"zero\"");
    c.value = v.get<double>();
    if (!(c.value >= 0.0 && c.value <= 1.0)) fail(path, k, "control value outside [0, 1]");
    return c;
  }

  void control(const json& obj, const std::string& path, const std::string& k,
               ControlValue& out) const {
    if (obj.contains(k)) out = control(obj.at(k), join(path, k), k);
  }

  void control(const json& obj, const std::string& path, const std::string& k,
               std::optional<ControlValue>& out) const {
    if (!obj.contains(k)) return;
    if (obj.at(k).is_null()) {
      out.reset();
      return;
    }
    out = control(obj.at(k), join(path, k), k);
  }

  void times(const json& obj, const std::string& path, const std::string& k,
             std::vector<double>& out) const {
    if (!obj.contains(k)) return;
    const json& v = obj.at(k);
    if (!v.is_array() || v.empty()) fail(join(path, k), k, "expected a non-empty array");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number() || e.get<double>() < 0.0 || e.get<double>() > 1.0) {
        fail(join(path, k), k, "entries are fractions of the horizon in [0, 1]");
      }
      out.push_back(e.get<double>());
    }
  }
};

const std::map<std::string, json>& presets() {
  static const std::map<std::string, json> table = [] {
    std::map<std::string, json> m;
    const json cubic = {{"kind", "cubic"}, {"theta", 1.0 / 3.0}};
    m["cas1"] = {{"model", cubic},
                 {"L", 5.0},
                 {"simulate", {{"T", 20.0}, {"u", "theta"}, {"v", "theta"}}},
                 {"optimize", {{"T", 20.0}, {"init", "zero"}}}};
    m["cas2"] = {{"model", cubic},
                 {"L", 8.0},
                 {"simulate", {{"T", 20.0}, {"u", "theta"}, {"v", "theta"}}},
                 {"optimize", {{"T", 20.0}, {"init", "zero"}}}};
    m["cas3"] = {{"model", cubic},
                 {"L", 12.0},
                 {"simulate", {{"T", 100.0}, {"u", "theta"}, {"v", "theta"}}},
                 {"optimize", {{"T", 100.0}, {"n_t", 2000}, {"init", "zero"}}}};
    m["mintime2"] = {{"model", cubic},
                     {"L", 8.0},
                     {"mintime", {{"tie_controls", false}, {"t_hi", 20.0}, {"init", "zero"}}}};
    m["mintime1"] = {{"model", cubic},
                     {"L", 8.0},
                     {"mintime", {{"tie_controls", true}, {"t_hi", 40.0}, {"init", "zero"}}}};
    m["staircase"] = {{"model", cubic}, {"L", 8.0}, {"staircase", json::object()}};
    m["obstacle"] = {{"model", cubic},
                     {"L", 12.0},
                     {"staircase", {{"override_gate", true}, {"t_max", 100.0}}}};
    return m;
  }();
  return table;
}

}  // namespace

json merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (const auto& [k, v] : over.items()) {
    base[k] = base.contains(k) ? merge(base[k], v) : v;
  }
  return base;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : presets()) v.push_back(k);
    return v;
  }();
  return names;
}

json preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset \"" + name + "\" (known: " + known + ")");
  }
  return it->second;
}

json parse_text(const std::string& text, const std::string& source) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
    from_json(doc, text, source);
    return doc;
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    throw ConfigError(fmt::format("{}:{}: malformed JSON: {}", source, line, e.what()));
  }
}

ExperimentConfig from_json(const json& doc, const std::string& text, const std::string& source) {
  const Reader r{text, source};
  ExperimentConfig c;
  r.keys(doc, "", {"model", "L", "seed", "out", "y0", "simulate", "staircase", "optimize",
                   "mintime", "stationary", "preset"});

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    r.keys(m, "model", {"kind", "theta"});
    r.string(m, "model", "kind", c.model.kind);
    if (c.model.kind != "logistic" && c.model.kind != "cubic") {
      r.fail("model.kind", "kind", "must be \"logistic\" or \"cubic\"");
    }
    r.number(m, "model", "theta", c.model.theta, 0.0, 1.0);
    if (!(c.model.theta > 0.0 && c.model.theta < 1.0)) {
      r.fail("model.theta", "theta", "must lie in (0, 1)");
    }
    try {
      c.model.build();
    } catch (const std::invalid_argument& e) {
      r.fail("model", "model", e.what());
    }
  }
  r.positive(doc, "", "L", c.L);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned())
      r.fail("seed", "seed", "expected a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  r.string(doc, "", "out", c.out);

  if (doc.contains("y0")) {
    const json& y = doc.at("y0");
    r.keys(y, "y0", {"kind", "value", "left", "right"});
    r.string(y, "y0", "kind", c.y0.kind);
    if (c.y0.kind != "ramp" && c.y0.kind != "constant" && c.y0.kind != "linear") {
      r.fail("y0.kind", "kind", "must be ramp, constant or linear");
    }
    r.number(y, "y0", "value", c.y0.value, 0.0, 1.0);
    r.number(y, "y0", "left", c.y0.left, 0.0, 1.0);
    r.number(y, "y0", "right", c.y0.right, 0.0, 1.0);
  }

  if (doc.contains("simulate")) {
    const json& s = doc.at("simulate");
    const std::string p = "simulate";
    r.keys(s, p, {"T", "u", "v", "n_x", "dt", "implicitness", "snapshots", "profile_times"});
    r.positive(s, p, "T", c.simulate.T);
    r.control(s, p, "u", c.simulate.u);
    r.control(s, p, "v", c.simulate.v);
    r.count(s, p, "n_x", c.simulate.n_x, 2);
    r.positive(s, p, "dt", c.simulate.dt);
    r.number(s, p, "implicitness", c.simulate.implicitness, 0.5, 1.0);
    r.count(s, p, "snapshots", c.simulate.snapshots, 1);
    r.times(s, p, "profile_times", c.simulate.profile_times);
  }

  if (doc.contains("staircase")) {
    const json& s = doc.at("staircase");
    const std::string p = "staircase";
    auto& k = c.staircase;
    r.keys(s, p, {"epsilon", "eta", "tau", "tol_final", "n_steps", "steer_horizon", "steer_box",
                  "t_max", "override_gate", "tie_controls", "n_x", "dt", "implicitness",
                  "record_every", "profile_times", "probes"});
    r.number(s, p, "epsilon", k.epsilon, 0.0, 1.0);
    r.positive(s, p, "eta", k.eta);
    r.positive(s, p, "tau", k.tau);
    r.positive(s, p, "tol_final", k.tol_final);
    r.count(s, p, "n_steps", k.n_steps, 1);
    r.positive(s, p, "steer_horizon", k.steer_horizon);
    r.positive(s, p, "steer_box", k.steer_box);
    r.positive(s, p, "t_max", k.t_max);
    r.flag(s, p, "override_gate", k.override_gate);
    r.flag(s, p, "tie_controls", k.tie_controls);
    r.count(s, p, "n_x", k.n_x, 2);
    r.positive(s, p, "dt", k.dt);
    r.number(s, p, "implicitness", k.implicitness, 0.5, 1.0);
    r.count(s, p, "record_every", k.record_every, 1);
    r.times(s, p, "profile_times", c.staircase_profile_times);
    r.count(s, p, "probes", c.staircase_probes, 0);
  }

  if (doc.contains("optimize")) {
    const json& s = doc.at("optimize");
    const std::string p = "optimize";
    auto& o = c.optimize;
    r.keys(s, p, {"T", "n_x", "n_t", "tie_controls", "fixed_controls", "init", "max_iters",
                  "tol_grad", "target_error", "profile_times"});
    r.positive(s, p, "T", o.T);
    r.count(s, p, "n_x", o.n_x, 2);
    r.count(s, p, "n_t", o.n_t, 1);
    r.flag(s, p, "tie_controls", o.tie_controls);
    r.control(s, p, "fixed_controls", o.fixed_controls);
    r.control(s, p, "init", o.init);
    r.count(s, p, "max_iters", o.max_iters, 0);
    r.positive(s, p, "tol_grad", o.tol_grad);
    if (s.contains("target_error") && !s.at("target_error").is_null()) {
      double t = 0.0;
      r.positive(s, p, "target_error", t);
      o.target_error = t;
    }
    r.times(s, p, "profile_times", o.profile_times);
  }

  if (doc.contains("mintime")) {
    const json& s = doc.at("mintime");
    const std::string p = "mintime";
    auto& m = c.mintime;
    r.keys(s, p, {"t_lo", "t_hi", "feas_tol", "bisect_tol", "max_bisect", "n_x", "n_t",
                  "tie_controls", "init", "max_iters", "profile_times"});
    r.number(s, p, "t_lo", m.t_lo, 0.0);
    r.positive(s, p, "t_hi", m.t_hi);
    if (m.t_hi <= m.t_lo) r.fail("mintime.t_hi", "t_hi", "must exceed t_lo");
    r.positive(s, p, "feas_tol", m.feas_tol);
    r.positive(s, p, "bisect_tol", m.bisect_tol);
    r.count(s, p, "max_bisect", m.max_bisect, 1);
    r.count(s, p, "n_x", m.n_x, 2);
    r.count(s, p, "n_t", m.n_t, 1);
    r.flag(s, p, "tie_controls", m.tie_controls);
    r.control(s, p, "init", m.init);
    r.count(s, p, "max_iters", m.max_iters, 0);
    r.times(s, p, "profile_times", m.profile_times);
  }

  if (doc.contains("stationary")) {
    const json& s = doc.at("stationary");
    const std::string p = "stationary";
    r.keys(s, p, {"a", "b", "slopes", "samples"});
    r.control(s, p, "a", c.stationary.a);
    r.control(s, p, "b", c.stationary.b);
    r.count(s, p, "slopes", c.stationary.slopes, 2);
    r.count(s, p, "samples", c.stationary.samples, 3);
  }

  if (c.model.kind == "logistic") {
    // "theta" has no meaning for a monostable term; simulate defaults to the target 1
    const json empty = json::object();
    const json& sim = doc.contains("simulate") ? doc.at("simulate") : empty;
    if (!sim.contains("u")) c.simulate.u = ControlValue{false, 1.0};
    if (!sim.contains("v")) c.simulate.v = ControlValue{false, 1.0};
    const auto uses_theta = [](const ControlValue& v) { return v.theta; };
    if (uses_theta(c.simulate.u) || uses_theta(c.simulate.v) || uses_theta(c.stationary.a) ||
        uses_theta(c.stationary.b) || (c.optimize.init && c.optimize.init->theta) ||
        (c.optimize.fixed_controls && c.optimize.fixed_controls->theta) ||
        (c.mintime.init && c.mintime.init->theta)) {
      r.fail("model.kind", "kind", "control value \"theta\" requires the cubic model");
    }
  }
  return c;
}

}  // namespace rdc::config
