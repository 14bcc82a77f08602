// rdc: command-line driver for threshold lengths, simulations, the staircase
// strategy and the optimal control solvers.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rdc/config.hpp"
#include "rdc/errors.hpp"
#include "rdc/io.hpp"
#include "rdc/optimal_control.hpp"
#include "rdc/pde.hpp"
#include "rdc/phase_plane.hpp"
#include "rdc/strategies.hpp"

namespace fs = std::filesystem;
using rdc::io::Json;
using rdc::io::number;

namespace {

enum Exit { kOk = 0, kConfig = 2, kFailed = 3, kNumerical = 4 };

struct Overrides {
  std::string preset;
  std::string config;
  std::optional<std::string> out;
  std::optional<double> L;
  std::optional<double> T;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<double> theta;
};

struct Loaded {
  rdc::config::ExperimentConfig cfg;
  nlohmann::json doc;
};

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw rdc::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Loaded load(const Overrides& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.preset.empty()) doc = rdc::config::preset(o.preset);
  std::string text;
  std::string source = "command line";
  if (!o.config.empty()) {
    text = slurp(o.config);
    source = o.config;
    doc = rdc::config::merge(doc, rdc::config::parse_text(text, source));
  }
  doc.erase("preset");
  if (o.model) doc["model"]["kind"] = *o.model;
  if (o.theta) doc["model"]["theta"] = *o.theta;
  if (o.L) doc["L"] = *o.L;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out) doc["out"] = *o.out;
  if (o.T) {
    doc["simulate"]["T"] = *o.T;
    doc["optimize"]["T"] = *o.T;
  }
  return {rdc::config::from_json(doc, text, source), doc};
}

Json model_json(const rdc::config::ModelSpec& m) {
  Json j;
  j["kind"] = m.kind;
  if (m.kind == "cubic") j["theta"] = m.theta;
  return j;
}

Json schedule_summary(const rdc::ControlSchedule& s) {
  Json j;
  j["steps"] = s.steps();
  j["dt"] = s.dt;
  j["horizon"] = s.horizon();
  return j;
}

// profile times are fractions of `horizon`
std::vector<double> scaled(const std::vector<double>& fractions, double horizon) {
  std::vector<double> t;
  for (double f : fractions) t.push_back(f * horizon);
  return t;
}

void write_run(const fs::path& dir, const rdc::Trajectory& traj,
               const std::vector<double>& profile_fractions, double horizon) {
  rdc::io::write_trajectory_csv(dir / "trajectory.csv", traj);
  rdc::io::write_trajectory_binary(dir / "trajectory.bin", traj);
  rdc::io::write_schedule_csv(dir / "schedule.csv", traj.schedule);
  rdc::io::write_profiles_csv(dir / "profiles.csv", traj, scaled(profile_fractions, horizon));
}

double rest_state(const rdc::ReactionModel& model) {
  return model.bistable() ? model.theta() : 1.0;
}

int cmd_thresholds(const Loaded& in) {
  const auto model = in.cfg.model.build();
  Json j;
  j["model"] = model_json(in.cfg.model);
  j["F1"] = model.F1();
  const auto ls = rdc::l_star(model);
  j["l_star"] = number(ls.value);
  j["attained"] = ls.attained;
  j["argmin_alpha"] = number(ls.argmin);
  j["l_star_lower_bound"] = number(rdc::l_star_lower_bound(model));
  if (model.bistable()) {
    j["theta1"] = model.theta1();
    const auto lt = rdc::l_theta(model);
    j["l_theta"] = number(lt.value);
    j["argmin_beta"] = number(lt.argmin);
    j["l_theta_lower_bound"] = number(rdc::l_theta_lower_bound(model));
  }
  rdc::io::write_json(fs::path(in.cfg.out) / "thresholds.json", j);
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_simulate(const Loaded& in) {
  const auto& c = in.cfg;
  const auto& s = c.simulate;
  const auto model = c.model.build();
  const auto y0 = c.y0.sample(c.L, s.n_x);
  const auto steps = static_cast<std::size_t>(std::llround(s.T / s.dt));
  if (steps == 0) throw rdc::ConfigError("simulate: T shorter than dt");
  const double u = s.u.resolve(model), v = s.v.resolve(model);
  const double dt = s.T / static_cast<double>(steps);
  const auto schedule = rdc::ControlSchedule::constant(steps, dt, u, v);
  rdc::SimulateOptions opt;
  opt.implicitness = s.implicitness;
  opt.record_every = std::max<std::size_t>(1, steps / s.snapshots);
  opt.target = rdc::Field::constant(c.L, s.n_x, rest_state(model));
  const auto traj = rdc::simulate(model, y0, schedule, opt);

  const fs::path dir = c.out;
  write_run(dir, traj, s.profile_times, s.T);
  Json j;
  j["command"] = "simulate";
  j["model"] = model_json(c.model);
  j["L"] = c.L;
  j["T"] = s.T;
  j["u"] = u;
  j["v"] = v;
  j["reference_state"] = rest_state(model);
  j["final_error"] = number(traj.distance.back());
  j["final_residual"] = number(rdc::stationary_residual(model, traj.final()));
  j["violations"] = traj.violations;
  j["max_violation"] = number(traj.max_violation);
  j["schedule"] = schedule_summary(schedule);
  rdc::io::write_json(dir / "outcome.json", j);
  std::cout << fmt::format("simulate: L={} T={} final error {}\n", c.L, s.T,
                           rdc::io::format_number(traj.distance.back()));
  return kOk;
}

int cmd_staircase(const Loaded& in) {
  const auto& c = in.cfg;
  const auto model = c.model.build();
  const auto y0 = c.y0.sample(c.L, c.staircase.n_x);
  const fs::path dir = c.out;
  const auto out = rdc::staircase_to_theta(model, y0, c.staircase);

  Json j;
  j["command"] = "staircase";
  j["model"] = model_json(c.model);
  j["L"] = c.L;
  j["success"] = out.success;
  j["message"] = out.message;
  j["t0"] = number(out.t0);
  j["t1"] = number(out.t1);
  j["t_end"] = number(out.t_end);
  j["final_error"] = number(out.final_error);
  j["threshold"] = number(out.threshold);
  j["corrections"] = out.corrections;
  j["path_steps"] = out.path_controls.size();
  double worst = 0.0;
  for (double e : out.dwell_errors) worst = std::max(worst, e);
  j["max_dwell_error"] = number(worst);
  j["violations"] = out.trajectory.violations;
  if (!out.schedule.u.empty()) j["schedule"] = schedule_summary(out.schedule);
  if (c.staircase_probes > 0) {
    const auto p = rdc::uniform_time_probe(model, c.L, c.staircase, c.seed, c.staircase_probes);
    Json times = Json::array();
    for (double t : p.times) times.push_back(number(t));
    j["capture_probe"] = Json{{"seed", c.seed},
                              {"t_star", number(p.t_star)},
                              {"t_zero", number(p.t_zero)},
                              {"t_one", number(p.t_one)},
                              {"times", times},
                              {"all_within", p.all_within}};
  }
  rdc::io::write_json(dir / "outcome.json", j);

  if (!out.trajectory.snapshots.empty()) {
    write_run(dir, out.trajectory, c.staircase_profile_times, out.t_end);
  }
  {
    std::ofstream os(dir / "path.csv");
    os << "step,u,v\n";
    for (std::size_t k = 0; k < out.path_controls.size(); ++k) {
      os << k << ',' << rdc::io::format_number(out.path_controls[k].first) << ','
         << rdc::io::format_number(out.path_controls[k].second) << '\n';
    }
  }
  std::cout << fmt::format("staircase: L={} success={} t_end={} final error {}\n", c.L,
                           out.success, rdc::io::format_number(out.t_end),
                           rdc::io::format_number(out.final_error));
  return out.success ? kOk : kFailed;
}

rdc::ControlSchedule start_schedule(const rdc::OcpSpec& spec,
                                    const std::optional<rdc::config::ControlValue>& init) {
  if (!init) return rdc::default_schedule(spec);
  const double a = init->resolve(spec.model);
  return rdc::ControlSchedule::constant(spec.n_t, spec.dt(), a, a);
}

Json result_json(const rdc::OptimResult& r) {
  Json j;
  j["final_cost"] = number(r.final_cost);
  j["terminal_error"] = number(r.terminal_error);
  j["grad_norm_final"] = number(r.grad_norm_final);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

int cmd_optimize(const Loaded& in) {
  const auto& c = in.cfg;
  const auto& o = c.optimize;
  const auto model = c.model.build();
  rdc::OcpSpec spec(model, c.L, o.T, o.n_x, o.n_t);
  spec.y0 = c.y0.sample(c.L, o.n_x);
  spec.tie_controls = o.tie_controls;
  if (o.fixed_controls) spec.fixed_controls = o.fixed_controls->resolve(model);
  spec.validate();

  rdc::ControlSchedule init = start_schedule(spec, o.init);
  if (spec.fixed_controls) {
    init = rdc::ControlSchedule::constant(spec.n_t, spec.dt(), *spec.fixed_controls,
                                          *spec.fixed_controls);
  }
  rdc::SolveOptions so;
  so.max_iters = o.max_iters;
  so.tol_grad = o.tol_grad;
  so.target_error = o.target_error;
  const auto r = rdc::solve_terminal(spec, init, so);
  const auto fw = rdc::forward(spec, r.schedule);

  const fs::path dir = c.out;
  write_run(dir, fw.trajectory, o.profile_times, o.T);
  rdc::io::write_cost_history_csv(dir / "cost_history.csv", r.cost_history);
  Json j;
  j["command"] = "optimize";
  j["model"] = model_json(c.model);
  j["L"] = c.L;
  j["T"] = o.T;
  j["tie_controls"] = o.tie_controls;
  j["result"] = result_json(r);
  j["schedule"] = schedule_summary(r.schedule);
  rdc::io::write_json(dir / "outcome.json", j);
  std::cout << fmt::format("optimize: L={} T={} terminal error {} after {} iterations\n", c.L,
                           o.T, rdc::io::format_number(r.terminal_error), r.iterations);
  return kOk;
}

int cmd_mintime(const Loaded& in) {
  const auto& c = in.cfg;
  const auto& m = c.mintime;
  const auto model = c.model.build();
  rdc::OcpSpec spec(model, c.L, m.t_hi, m.n_x, m.n_t);
  spec.y0 = c.y0.sample(c.L, m.n_x);
  spec.tie_controls = m.tie_controls;
  spec.validate();

  rdc::MinimalTimeOptions mo;
  mo.t_lo = m.t_lo;
  mo.t_hi = m.t_hi;
  mo.feas_tol = m.feas_tol;
  mo.bisect_tol = m.bisect_tol;
  mo.max_bisect = m.max_bisect;
  mo.solve.max_iters = m.max_iters;
  mo.init = start_schedule(spec, m.init);
  const auto mt = rdc::minimal_time(spec, mo);

  rdc::OcpSpec at = spec;
  at.horizon = mt.t_f;
  const auto fw = rdc::forward(at, mt.result.schedule);
  const fs::path dir = c.out;
  write_run(dir, fw.trajectory, m.profile_times, mt.t_f);
  rdc::io::write_cost_history_csv(dir / "cost_history.csv", mt.result.cost_history);
  Json j;
  j["command"] = "mintime";
  j["model"] = model_json(c.model);
  j["L"] = c.L;
  j["tie_controls"] = m.tie_controls;
  j["feas_tol"] = m.feas_tol;
  j["t_f"] = number(mt.t_f);
  j["result"] = result_json(mt.result);
  Json trials = Json::array();
  for (const auto& [t, ok] : mt.trials) trials.push_back(Json{{"T", t}, {"feasible", ok}});
  j["trials"] = trials;
  rdc::io::write_json(dir / "outcome.json", j);
  std::cout << fmt::format("mintime: L={} controls={} t_f={}\n", c.L,
                           m.tie_controls ? "tied" : "two", rdc::io::format_number(mt.t_f));
  return kOk;
}

int cmd_stationary(const Loaded& in) {
  const auto& c = in.cfg;
  const auto model = c.model.build();
  const double a = c.stationary.a.resolve(model), b = c.stationary.b.resolve(model);
  rdc::ShootingOptions so;
  so.slopes = c.stationary.slopes;
  so.samples = c.stationary.samples;
  const auto states = rdc::find_stationary_solutions(model, a, b, c.L, so);

  const fs::path dir = c.out;
  rdc::io::write_stationary_csv(dir / "stationary.csv", states);
  Json j;
  j["command"] = "stationary";
  j["model"] = model_json(c.model);
  j["L"] = c.L;
  j["a"] = a;
  j["b"] = b;
  Json list = Json::array();
  for (const auto& s : states) {
    double lo = 1.0, hi = 0.0;
    for (double w : s.values) {
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    list.push_back(Json{{"slope", s.init.wp},
                        {"energy", s.energy},
                        {"min", lo},
                        {"max", hi},
                        {"residual", number(rdc::stationary_residual(model, s))},
                        {"low_confidence", s.low_confidence}});
  }
  j["solutions"] = list;
  rdc::io::write_json(dir / "stationary.json", j);
  std::cout << fmt::format("stationary: L={} a={} b={} found {}\n", c.L, a, b, states.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary control of 1-D reaction-diffusion equations"};
  app.fallthrough();
  app.require_subcommand(1);

  Overrides o;
  std::string preset_help = "figure regime:";
  for (const auto& n : rdc::config::preset_names()) preset_help += " " + n;
  app.add_option("--preset", o.preset, preset_help);
  app.add_option("--config", o.config, "JSON experiment config (overrides the preset)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory (default: out)");
  app.add_option("--L", o.L, "domain length");
  app.add_option("--T", o.T, "horizon of simulate / optimize");
  app.add_option("--seed", o.seed, "seed for randomized probes");
  app.add_option("--model", o.model, "logistic or cubic");
  app.add_option("--theta", o.theta, "theta of the cubic model");

  using Cmd = int (*)(const Loaded&);
  Cmd chosen = nullptr;
  const auto sub = [&](const char* name, const char* help, Cmd fn) {
    app.add_subcommand(name, help)->callback([&chosen, fn] { chosen = fn; });
  };
  sub("thresholds", "threshold lengths L*, L_theta and their lower bounds", cmd_thresholds);
  sub("simulate", "constant-control simulation", cmd_simulate);
  sub("staircase", "static phase then path following to theta", cmd_staircase);
  sub("optimize", "terminal-cost optimal control", cmd_optimize);
  sub("mintime", "minimal-time control by bisection on the horizon", cmd_mintime);
  sub("stationary", "steady states with given boundary values", cmd_stationary);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const Loaded in = load(o);
    return chosen(in);
  } catch (const rdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const rdc::DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kConfig;
  } catch (const rdc::KindError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kConfig;
  } catch (const rdc::ModelError& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return kConfig;
  } catch (const rdc::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kFailed;
  } catch (const rdc::TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << '\n';
    return kFailed;
  } catch (const rdc::CaptureError& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kFailed;
  } catch (const rdc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
