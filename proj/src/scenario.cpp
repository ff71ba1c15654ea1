#include "ismpc/scenario.hpp"

#include "ismpc/feasibility.hpp"
#include "ismpc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ismpc::sim {

namespace {

std::size_t to_samples(double seconds, double delta, const char* what) {
  const double n = seconds / delta;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6 || r < 0.0) {
    throw ConfigError(std::string(what) + " must be a non-negative multiple of the sample time");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

controller::MpcConfig Scenario::resolved_mpc() const {
  controller::MpcConfig cfg = mpc;
  cfg.horizon_c = to_samples(control_horizon, sample_time, "mpc.control_horizon");
  cfg.preview_p = preview_horizon > 0.0 ? to_samples(preview_horizon, sample_time, "mpc.preview_horizon")
                                        : cfg.horizon_c;
  return cfg;
}

void Scenario::validate() const {
  try {
    (void)lip();
    resolved_mpc().validate();
    if (plan_kind == PlanKind::Generated) cruise.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(duration > 0.0)) throw ConfigError("scenario.duration must be positive");
  (void)to_samples(duration, sample_time, "scenario.duration");
  if (!(divergence_threshold > 0.0)) throw ConfigError("scenario.divergence_threshold must be positive");
  if (!(ss_fraction > 0.0) || ss_fraction > 1.0) throw ConfigError("plan.ss_fraction must be in (0, 1]");
  for (const auto& k : reference.knots()) {
    if (k.time < 0.0 || k.time > duration) throw ConfigError("reference knot time outside the run duration");
  }
  switch (plan_kind) {
    case PlanKind::Regular:
      if (!(regular.step_time > 0.0)) throw ConfigError("plan.step_time must be positive");
      if (!(regular.lateral > 0.0)) throw ConfigError("plan.lateral must be positive");
      break;
    case PlanKind::Explicit:
      if (explicit_plan.steps.empty()) throw ConfigError("explicit plan needs at least one plan.step entry");
      try {
        explicit_plan.validate();
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      break;
    case PlanKind::Generated:
      if (!(regular.lateral > 0.0)) throw ConfigError("plan.lateral must be positive");
      break;
  }
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  const double v = parse_number(s);
  if (v < 0.0 || v != std::floor(v)) throw ConfigError("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true/false, got '" + s + "'");
}

template <typename E>
E parse_enum(const std::string& s, const std::map<std::string, E>& options) {
  const auto it = options.find(s);
  if (it == options.end()) {
    std::string names;
    for (const auto& [k, v] : options) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("unknown value '" + s + "' (expected one of: " + names + ")");
  }
  return it->second;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t count) {
  const auto items = split_list(s);
  if (items.size() != count) {
    throw ConfigError("expected " + std::to_string(count) + " comma-separated values, got '" + s + "'");
  }
  std::vector<double> out;
  for (const auto& i : items) out.push_back(parse_number(i));
  return out;
}

footstep::Side parse_side(const std::string& s) {
  return parse_enum<footstep::Side>(s, {{"left", footstep::Side::Left}, {"right", footstep::Side::Right}});
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  Scenario s;
  std::map<std::size_t, footstep::ReferenceSchedule::Knot> knots;
  std::map<std::size_t, footstep::Footstep> steps;
  std::set<std::string> seen;

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"scenario.name", [&](const std::string& v) { s.name = v; }},
      {"scenario.description", [&](const std::string& v) { s.description = v; }},
      {"scenario.duration", [&](const std::string& v) { s.duration = parse_number(v); }},
      {"scenario.controller",
       [&](const std::string& v) {
         s.mpc.kind = parse_enum<controller::ControllerKind>(
             v, {{"ismpc", controller::ControllerKind::IsMpc}, {"standard", controller::ControllerKind::StandardMpc}});
       }},
      {"scenario.divergence_threshold", [&](const std::string& v) { s.divergence_threshold = parse_number(v); }},
      {"scenario.rng_seed", [&](const std::string& v) { s.rng_seed = parse_count(v); }},
      {"lip.gravity", [&](const std::string& v) { s.gravity = parse_number(v); }},
      {"lip.com_height", [&](const std::string& v) { s.com_height = parse_number(v); }},
      {"lip.sample_time", [&](const std::string& v) { s.sample_time = parse_number(v); }},
      {"mpc.control_horizon", [&](const std::string& v) { s.control_horizon = parse_number(v); }},
      {"mpc.preview_horizon", [&](const std::string& v) { s.preview_horizon = parse_number(v); }},
      {"mpc.tail",
       [&](const std::string& v) {
         s.mpc.tail = parse_enum<tails::TailKind>(v, {{"truncated", tails::TailKind::Truncated},
                                                      {"periodic", tails::TailKind::Periodic},
                                                      {"anticipative", tails::TailKind::Anticipative}});
       }},
      {"mpc.residual",
       [&](const std::string& v) {
         s.mpc.residual = parse_enum<tails::Residual>(
             v, {{"truncated", tails::Residual::Truncated}, {"periodic", tails::Residual::Periodic}});
       }},
      {"mpc.constraint_form",
       [&](const std::string& v) {
         s.mpc.form = parse_enum<controller::ConstraintForm>(
             v, {{"stability", controller::ConstraintForm::StabilityRow},
                 {"terminal", controller::ConstraintForm::Terminal}});
       }},
      {"mpc.beta", [&](const std::string& v) { s.mpc.beta = parse_number(v); }},
      {"mpc.footsteps_fixed", [&](const std::string& v) { s.mpc.footsteps_fixed = parse_bool(v); }},
      {"mpc.zmp_dx", [&](const std::string& v) { s.mpc.zmp_dims.x() = parse_number(v); }},
      {"mpc.zmp_dy", [&](const std::string& v) { s.mpc.zmp_dims.y() = parse_number(v); }},
      {"mpc.centering_weight", [&](const std::string& v) { s.mpc.centering_weight = parse_number(v); }},
      {"mpc.tolerance", [&](const std::string& v) { s.mpc.tolerance = parse_number(v); }},
      {"limits.theta_max", [&](const std::string& v) { s.mpc.limits.theta_max = parse_number(v); }},
      {"limits.ell", [&](const std::string& v) { s.mpc.limits.ell = parse_number(v); }},
      {"limits.da_x", [&](const std::string& v) { s.mpc.limits.da_x = parse_number(v); }},
      {"limits.da_y", [&](const std::string& v) { s.mpc.limits.da_y = parse_number(v); }},
      {"cruise.v_bar", [&](const std::string& v) { s.cruise.v_bar = parse_number(v); }},
      {"cruise.ts_bar", [&](const std::string& v) { s.cruise.ts_bar = parse_number(v); }},
      {"cruise.ls_bar", [&](const std::string& v) { s.cruise.ls_bar = parse_number(v); }},
      {"cruise.alpha", [&](const std::string& v) { s.cruise.alpha = parse_number(v); }},
      {"plan.kind",
       [&](const std::string& v) {
         s.plan_kind = parse_enum<PlanKind>(
             v, {{"regular", PlanKind::Regular}, {"explicit", PlanKind::Explicit}, {"generated", PlanKind::Generated}});
       }},
      {"plan.ss_fraction", [&](const std::string& v) { s.ss_fraction = parse_number(v); }},
      {"plan.steps", [&](const std::string& v) { s.regular.steps = parse_count(v); }},
      {"plan.step_length", [&](const std::string& v) { s.regular.step_length = parse_number(v); }},
      {"plan.lateral", [&](const std::string& v) { s.regular.lateral = parse_number(v); }},
      {"plan.first_time", [&](const std::string& v) { s.regular.first_time = parse_number(v); }},
      {"plan.step_time", [&](const std::string& v) { s.regular.step_time = parse_number(v); }},
      {"plan.partner",
       [&](const std::string& v) {
         const auto n = parse_numbers(v, 3);
         s.explicit_plan.initial_partner = footstep::Pose2{n[0], n[1], n[2]};
       }},
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      if (key.rfind("reference.", 0) == 0) {
        const auto idx = parse_count(key.substr(10));
        const auto n = parse_numbers(value, 4);
        knots[idx] = {n[0], {n[1], n[2], n[3]}};
      } else if (key.rfind("plan.step.", 0) == 0) {
        const auto idx = parse_count(key.substr(10));
        const auto items = split_list(value);
        if (items.size() != 5) throw ConfigError("expected 't, x, y, theta, side'");
        steps[idx] = {{parse_number(items[1]), parse_number(items[2]), parse_number(items[3])},
                      parse_side(items[4]), parse_number(items[0])};
      } else {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown key '" + key + "'");
        it->second(value);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }

  std::vector<footstep::ReferenceSchedule::Knot> kv;
  for (const auto& [i, k] : knots) kv.push_back(k);
  try {
    s.reference = footstep::ReferenceSchedule(std::move(kv));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  for (const auto& [i, st] : steps) s.explicit_plan.steps.push_back(st);
  s.explicit_plan.ss_fraction = s.ss_fraction;
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_scenario(in, path);
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

// Shared setup of the fixed-footstep comparisons: HRP-4-like pendulum,
// 0.5 s steps split 0.4 / 0.1, 4 cm ZMP regions.
constexpr const char* kFixedGait = R"(
lip.com_height = 0.78
lip.sample_time = 0.01
mpc.zmp_dx = 0.04
mpc.zmp_dy = 0.04
mpc.footsteps_fixed = true
plan.kind = regular
plan.step_length = 0.1
plan.lateral = 0.18
plan.first_time = 0.5
plan.step_time = 0.5
plan.ss_fraction = 0.8
scenario.duration = 10
)";

// Two steps forward, then back onto the same footsteps.
constexpr const char* kIrregularPlan = R"(
plan.kind = explicit
plan.ss_fraction = 0.8
plan.partner = 0, 0.09, 0
plan.step.0 = 0.5, 0, -0.09, 0, right
plan.step.1 = 1.0, 0.15, 0.09, 0, left
plan.step.2 = 1.5, 0.3, -0.09, 0, right
plan.step.3 = 2.0, 0.15, 0.09, 0, left
plan.step.4 = 2.5, 0, -0.09, 0, right
plan.step.5 = 3.0, 0, 0.09, 0, left
lip.com_height = 0.78
lip.sample_time = 0.01
mpc.zmp_dx = 0.04
mpc.zmp_dy = 0.04
mpc.footsteps_fixed = true
mpc.control_horizon = 0.8
mpc.preview_horizon = 1.6
scenario.duration = 6
)";

// Full pipeline: footstep generation from reference velocities.
constexpr const char* kGenerated = R"(
lip.com_height = 0.78
lip.sample_time = 0.01
mpc.zmp_dx = 0.04
mpc.zmp_dy = 0.04
mpc.footsteps_fixed = false
mpc.beta = 1e4
mpc.control_horizon = 1.6
mpc.preview_horizon = 3.2
mpc.tail = anticipative
limits.theta_max = 0.39269908169872414
limits.ell = 0.18
limits.da_x = 0.3
limits.da_y = 0.07
cruise.v_bar = 0.15
cruise.ts_bar = 0.8
cruise.ls_bar = 0.12
cruise.alpha = 0.1
plan.kind = generated
plan.ss_fraction = 0.6
plan.lateral = 0.18
plan.first_time = 0.5
)";

struct Builtin {
  const char* name;
  const char* description;
  const char* base;
  const char* extra;
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = {
      {"sim1_ismpc", "regular gait, Tc = 1.5 s, IS-MPC with periodic tail", kFixedGait,
       "mpc.control_horizon = 1.5\nmpc.tail = periodic\n"},
      {"sim1_standard", "regular gait, Tc = 1.5 s, standard (jerk) MPC", kFixedGait,
       "mpc.control_horizon = 1.5\nscenario.controller = standard\n"},
      {"sim2_ismpc", "regular gait, Tc = 1.0 s, IS-MPC with periodic tail", kFixedGait,
       "mpc.control_horizon = 1.0\nmpc.tail = periodic\n"},
      {"sim2_standard", "regular gait, Tc = 1.0 s, standard (jerk) MPC", kFixedGait,
       "mpc.control_horizon = 1.0\nscenario.controller = standard\n"},
      {"sim2_standard_centering", "regular gait, Tc = 1.0 s, standard MPC with ZMP centering cost", kFixedGait,
       "mpc.control_horizon = 1.0\nscenario.controller = standard\nmpc.centering_weight = 10\n"},
      {"highcom_ismpc", "regular gait, h_c = 1.6 m, Tc = 1.5 s, IS-MPC with periodic tail", kFixedGait,
       "mpc.control_horizon = 1.5\nmpc.tail = periodic\nlip.com_height = 1.6\n"},
      {"highcom_standard", "regular gait, h_c = 1.6 m, Tc = 1.5 s, standard MPC", kFixedGait,
       "mpc.control_horizon = 1.5\nscenario.controller = standard\nlip.com_height = 1.6\n"},
      {"sim3_truncated", "regular gait, Tc = 0.8 s, truncated tail", kFixedGait,
       "mpc.control_horizon = 0.8\nmpc.preview_horizon = 1.6\nmpc.tail = truncated\n"},
      {"sim3_periodic", "regular gait, Tc = 0.8 s, periodic tail", kFixedGait,
       "mpc.control_horizon = 0.8\nmpc.preview_horizon = 1.6\nmpc.tail = periodic\n"},
      {"sim4_periodic", "two steps forward then back, Tc = 0.8 s, periodic tail", kIrregularPlan,
       "mpc.tail = periodic\n"},
      {"sim4_anticipative", "two steps forward then back, Tc = 0.8 s, Tp = 1.6 s, anticipative tail",
       kIrregularPlan, "mpc.tail = anticipative\n"},
      {"recfeas_bound", "regular gait for 20 s, anticipative tail, Tp just above the sufficient bound",
       kFixedGait,
       "scenario.duration = 20\nmpc.control_horizon = 0.8\nmpc.preview_horizon = 1.73\nmpc.tail = anticipative\n"},
      {"recfeas_short", "regular gait for 20 s, anticipative tail, Tp far below the bound", kFixedGait,
       "scenario.duration = 20\nmpc.control_horizon = 0.8\nmpc.preview_horizon = 0.9\nmpc.tail = anticipative\n"},
      {"sim5_straight", "generated footsteps, v_x 0.1 m/s then 0.3 m/s", kGenerated,
       "scenario.duration = 12\nreference.0 = 0, 0.1, 0, 0\nreference.1 = 6, 0.3, 0, 0\n"},
      {"sim6_cusp", "generated footsteps along a cusp", kGenerated,
       "scenario.duration = 20\nreference.0 = 0, 0.2, 0, 0.2\nreference.1 = 7.85, -0.2, 0, 0.2\n"
       "reference.2 = 15.71, -0.2, 0, 0\n"},
  };
  return list;
}

const Builtin& find_builtin(const std::string& name) {
  for (const auto& b : builtins()) {
    if (name == b.name) return b;
  }
  throw ConfigError("unknown builtin scenario '" + name + "'");
}

}  // namespace

std::vector<BuiltinInfo> builtin_scenarios() {
  std::vector<BuiltinInfo> out;
  for (const auto& b : builtins()) out.push_back({b.name, b.description});
  return out;
}

std::string builtin_config_text(const std::string& name) {
  const Builtin& b = find_builtin(name);
  // Later keys in `extra` replace those of the base block.
  std::map<std::string, std::string> values;
  std::vector<std::string> order;
  auto absorb = [&](const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(0, eq));
      if (!values.count(key)) order.push_back(key);
      values[key] = trim(line.substr(eq + 1));
    }
  };
  absorb(b.base);
  absorb(b.extra);
  std::string text = "scenario.name = " + std::string(b.name) + "\nscenario.description = " + b.description + "\n";
  for (const auto& k : order) {
    if (k == "scenario.name" || k == "scenario.description") continue;
    text += k + " = " + values[k] + "\n";
  }
  return text;
}

Scenario builtin_scenario(const std::string& name) {
  std::stringstream ss(builtin_config_text(name));
  return parse_scenario(ss, "builtin:" + name);
}

// ---------------------------------------------------------------------------
// Closed loop

namespace {

constexpr double kTimeSlack = 1e-9;

std::size_t auto_step_count(const Scenario& s) {
  const double horizon = std::max(s.control_horizon, s.preview_horizon);
  const double span = s.duration + horizon - s.regular.first_time;
  return static_cast<std::size_t>(std::max(0.0, std::ceil(span / s.regular.step_time))) + 2;
}

footstep::FootstepPlan initial_plan(const Scenario& s) {
  switch (s.plan_kind) {
    case PlanKind::Regular:
      return schedule::regular_plan(s.regular.steps ? s.regular.steps : auto_step_count(s), s.regular.step_length,
                                    s.regular.lateral, s.regular.first_time, s.regular.step_time, s.ss_fraction);
    case PlanKind::Explicit: return s.explicit_plan;
    case PlanKind::Generated: return schedule::regular_plan(1, 0.0, s.regular.lateral, s.regular.first_time, 1.0,
                                                            s.ss_fraction);
  }
  return {};
}

}  // namespace

RunLog run_scenario(const Scenario& s) {
  s.validate();
  const lip::LipParams params = s.lip();
  const controller::MpcConfig cfg = s.resolved_mpc();
  const double delta = params.sample_time();
  const double preview_time = static_cast<double>(cfg.preview_p) * delta;
  controller::Controller ctl(params, cfg);

  footstep::FootstepPlan plan = initial_plan(s);
  std::vector<footstep::Footstep> frozen(plan.steps.begin(), plan.steps.begin() + 1);
  std::map<std::size_t, Eigen::Vector2d> last_planned;

  auto regenerate = [&](double t_k) {
    if (s.plan_kind != PlanKind::Generated) return;
    footstep::CandidateRequest req{s.reference, frozen.back(), t_k + preview_time, s.cruise, cfg.limits};
    plan.steps = frozen;
    for (auto& c : footstep::generate_candidates(req)) plan.steps.push_back(c);
  };

  Eigen::Vector2d start = plan.steps.front().pose.position();
  if (plan.initial_partner) start = 0.5 * (start + plan.initial_partner->position());
  lip::PlanarState state;
  state.x_axis = {start.x(), 0.0, start.x()};
  state.y_axis = {start.y(), 0.0, start.y()};

  RunLog log;
  log.scenario = s.name;
  log.sample_time = delta;
  const std::size_t n = to_samples(s.duration, delta, "scenario.duration");
  const bool rotated_or_free = !cfg.footsteps_fixed || s.plan_kind == PlanKind::Generated;
  log.approximate_margins = rotated_or_free;

  for (std::size_t k = 0; k < n; ++k) {
    const double t_k = static_cast<double>(k) * delta;
    state.time = t_k;
    regenerate(t_k);
    // Freeze every foot that has touched down.
    while (frozen.size() < plan.steps.size() && plan.landing_time(frozen.size()) <= t_k + kTimeSlack) {
      const std::size_t j = frozen.size();
      if (!cfg.footsteps_fixed) {
        const auto it = last_planned.find(j);
        if (it != last_planned.end()) {
          plan.steps[j].pose.x = it->second.x();
          plan.steps[j].pose.y = it->second.y();
        }
      }
      frozen.push_back(plan.steps[j]);
      regenerate(t_k);
    }

    RunRecord rec;
    rec.t = t_k;
    rec.xc = state.x_axis.com_pos;
    rec.yc = state.y_axis.com_pos;
    rec.dxc = state.x_axis.com_vel;
    rec.dyc = state.y_axis.com_vel;
    rec.xz = state.x_axis.zmp_pos;
    rec.yz = state.y_axis.zmp_pos;
    const auto dx = lip::decompose(state.x_axis, params);
    const auto dy = lip::decompose(state.y_axis, params);
    rec.xu = dx.unstable;
    rec.yu = dy.unstable;

    // Admissible x_u range of this iteration's QP, per axis.
    {
      const auto regions = schedule::region_schedule(plan, t_k, delta, cfg.horizon_c, cfg.zmp_dims);
      const auto [tx, ty] = controller::make_tails(state, plan, params, cfg);
      const tails::Tail* tl[2] = {&tx, &ty};
      feasibility::FeasibilityInterval iv[2];
      bool approx = false;
      for (int a = 0; a < 2; ++a) {
        std::vector<double> lo;
        std::vector<double> hi;
        feasibility::axis_bounds(regions, plan, a, lo, hi, approx);
        const auto row = tails::build_stability_row(*tl[a], params, cfg.horizon_c);
        iv[a] = feasibility::sampled_interval(lo, hi, a == 0 ? rec.xz : rec.yz, row, params, t_k);
      }
      if (approx) log.approximate_margins = true;
      rec.xu_min = iv[0].lower;
      rec.xu_max = iv[0].upper;
      rec.yu_min = iv[1].lower;
      rec.yu_max = iv[1].upper;
      rec.margin_x = feasibility::feasibility_margin(rec.xu, iv[0]);
      rec.margin_y = feasibility::feasibility_margin(rec.yu, iv[1]);
    }
    const auto phase = schedule::phase_at(plan, t_k);
    rec.support_phase = std::string(schedule::to_string(phase.phase));
    rec.active_footstep_index = static_cast<long>(phase.step);

    const auto result = ctl.iterate(state, plan, frozen.size());
    rec.qp_status = std::string(qp::to_string(result.status));
    log.records.push_back(rec);

    if (result.status == qp::QpStatus::Infeasible) {
      log.exit = ExitReason::Infeasible;
      break;
    }
    if (result.status == qp::QpStatus::MaxIter) {
      log.exit = ExitReason::SolverLimit;
      break;
    }
    if (std::abs(rec.xc - rec.xz) > s.divergence_threshold || std::abs(rec.yc - rec.yz) > s.divergence_threshold) {
      log.exit = ExitReason::Diverged;
      break;
    }
    last_planned.clear();
    for (const auto& [j, p] : result.planned_footsteps) last_planned[j] = p;
    state = result.next_state;
  }
  return log;
}

int exit_code(const RunLog& log) {
  switch (log.exit) {
    case ExitReason::Completed: return 0;
    case ExitReason::Infeasible:
    case ExitReason::SolverLimit: return 3;
    case ExitReason::Diverged: return 4;
  }
  return 1;
}

}  // namespace ismpc::sim
