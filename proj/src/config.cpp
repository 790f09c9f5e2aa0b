#include "tiltsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "tiltsim/errors.hpp"

namespace tiltsim {

using nlohmann::json;

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError(join_path(path, key), "unknown key");
  }
}

const json& require_key(const json& obj, const std::string& path,
                        const std::string& key) {
  if (!obj.contains(key))
    throw ConfigError(join_path(path, key), "missing required key");
  return obj.at(key);
}

double as_num(const json& v, const std::string& path) {
  if (!v.is_number())
    throw ConfigError(path, "expected a number");
  return v.get<double>();
}

double require_num(const json& obj, const std::string& path,
                   const std::string& key) {
  return as_num(require_key(obj, path, key), join_path(path, key));
}

double opt_num(const json& obj, const std::string& path,
               const std::string& key, double def) {
  if (!obj.contains(key)) return def;
  return as_num(obj.at(key), join_path(path, key));
}

bool opt_bool(const json& obj, const std::string& path,
              const std::string& key, bool def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError(join_path(path, key), "expected a boolean");
  return v.get<bool>();
}

Vec3 as_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(path, "expected an array of 3 numbers");
  return Vec3(as_num(v[0], path), as_num(v[1], path), as_num(v[2], path));
}

Vec3 require_vec3(const json& obj, const std::string& path,
                  const std::string& key) {
  return as_vec3(require_key(obj, path, key), join_path(path, key));
}

Vec3 opt_vec3(const json& obj, const std::string& path, const std::string& key,
              const Vec3& def) {
  if (!obj.contains(key)) return def;
  return as_vec3(obj.at(key), join_path(path, key));
}

// Gain axis entries accept a scalar (broadcast) or an array of 5.
Vec5 as_vec5_gain(const json& v, const std::string& path) {
  if (v.is_number()) return Vec5::Constant(v.get<double>());
  if (v.is_array() && v.size() == 5) {
    Vec5 out;
    for (int i = 0; i < 5; ++i) out(i) = as_num(v[i], path);
    return out;
  }
  throw ConfigError(path, "expected a number or an array of 5 numbers");
}

void parse_vehicle(const json& obj, const std::string& path,
                   VehicleParams& vp) {
  reject_unknown(obj, path,
                 {"m", "inertia_diag", "L_h", "L_v", "k_f", "g", "F_max",
                  "servo_tau", "f_z_min", "tilt_margin", "gimbal_margin"});
  vp.m = require_num(obj, path, "m");
  vp.I_b = require_vec3(obj, path, "inertia_diag").asDiagonal();
  vp.L_h = require_num(obj, path, "L_h");
  vp.L_v = require_num(obj, path, "L_v");
  vp.k_f = require_num(obj, path, "k_f");
  vp.g = require_num(obj, path, "g");
  vp.F_max = require_num(obj, path, "F_max");
  vp.servo_tau = require_num(obj, path, "servo_tau");
  vp.f_z_min = opt_num(obj, path, "f_z_min", vp.f_z_min);
  vp.tilt_margin = opt_num(obj, path, "tilt_margin", vp.tilt_margin);
  vp.gimbal_margin = opt_num(obj, path, "gimbal_margin", vp.gimbal_margin);
  vp.validate();
}

void parse_gains(const json& obj, const std::string& path, GainSet& gains) {
  reject_unknown(obj, path, {"underactuated", "fully_actuated"});
  const json& ua = require_key(obj, path, "underactuated");
  const std::string ua_path = join_path(path, "underactuated");
  reject_unknown(ua, ua_path, {"kp", "kd", "ki"});
  gains.K_up = require_num(ua, ua_path, "kp");
  gains.K_ud = require_num(ua, ua_path, "kd");
  gains.K_ui = require_num(ua, ua_path, "ki");

  const json& fa = require_key(obj, path, "fully_actuated");
  const std::string fa_path = join_path(path, "fully_actuated");
  reject_unknown(fa, fa_path, {"kp", "kd", "ki"});
  gains.K_fp = as_vec5_gain(require_key(fa, fa_path, "kp"), join_path(fa_path, "kp"));
  gains.K_fd = as_vec5_gain(require_key(fa, fa_path, "kd"), join_path(fa_path, "kd"));
  gains.K_fi = as_vec5_gain(require_key(fa, fa_path, "ki"), join_path(fa_path, "ki"));
}

void parse_controller(const json& obj, const std::string& path,
                      ControllerConfig& cc) {
  reject_unknown(obj, path,
                 {"deriv_filter_cutoff", "integral_limit", "gf_cond_max",
                  "roll_margin", "fz_bar_floor"});
  cc.deriv_filter_cutoff =
      opt_num(obj, path, "deriv_filter_cutoff", cc.deriv_filter_cutoff);
  cc.integral_limit = opt_num(obj, path, "integral_limit", cc.integral_limit);
  cc.gf_cond_max = opt_num(obj, path, "gf_cond_max", cc.gf_cond_max);
  cc.roll_margin = opt_num(obj, path, "roll_margin", cc.roll_margin);
  cc.fz_bar_floor = opt_num(obj, path, "fz_bar_floor", cc.fz_bar_floor);
}

void parse_thresholds(const json& obj, const std::string& path,
                      std::map<std::string, double>& bounds) {
  for (const auto& [key, val] : obj.items()) {
    if (!bounds.count(key))
      throw ConfigError(join_path(path, key), "unknown threshold");
    bounds[key] = as_num(val, join_path(path, key));
  }
}

void parse_initial(const json& obj, const std::string& path, RigidState& st) {
  reject_unknown(obj, path,
                 {"position", "velocity", "euler_deg", "omega", "eta_deg"});
  st.p = opt_vec3(obj, path, "position", st.p);
  st.v = opt_vec3(obj, path, "velocity", st.v);
  const Vec3 euler =
      opt_vec3(obj, path, "euler_deg", rad2deg(1.0) * st.phi.vec());
  st.phi = EulerZYX::from_vec(deg2rad(1.0) * euler);
  st.omega = opt_vec3(obj, path, "omega", st.omega);
  st.eta = deg2rad(opt_num(obj, path, "eta_deg", rad2deg(st.eta)));
}

void parse_scenario(const json& obj, const std::string& path, Scenario& sc,
                    std::map<std::string, double>& bounds) {
  std::set<std::string> allowed = {"duration",   "plant_dt",
                                   "control_dt", "initial",
                                   "thresholds", "enforce_gain_check"};
  switch (sc.kind) {
    case ScenarioKind::SquareXY:
      allowed.insert({"side", "period", "start"});
      break;
    case ScenarioKind::PitchSweep:
      allowed.insert({"amplitude_deg", "period", "position"});
      break;
    case ScenarioKind::HoverHold:
      allowed.insert({"target", "pitch_deg", "yaw_deg", "initial_offset",
                      "initial_euler_offset_deg"});
      break;
    case ScenarioKind::PerchPush:
      allowed.insert({"start", "site_point", "site_pitch_deg", "site_yaw_deg",
                      "attach_radius", "align_tol_deg", "cart", "hold_thrust",
                      "push_thrust", "push_delay", "phase_duration"});
      break;
  }
  reject_unknown(obj, path, allowed);

  sc.duration = opt_num(obj, path, "duration", sc.duration);
  sc.plant_dt = opt_num(obj, path, "plant_dt", sc.plant_dt);
  sc.control_dt = opt_num(obj, path, "control_dt", sc.control_dt);
  sc.enforce_gain_check =
      opt_bool(obj, path, "enforce_gain_check", sc.enforce_gain_check);

  switch (sc.kind) {
    case ScenarioKind::SquareXY: {
      sc.square_side = opt_num(obj, path, "side", sc.square_side);
      sc.square_period = opt_num(obj, path, "period", sc.square_period);
      sc.hold_position = opt_vec3(obj, path, "start", sc.hold_position);
      sc.initial.p = sc.hold_position;
      break;
    }
    case ScenarioKind::PitchSweep: {
      sc.pitch_amplitude = deg2rad(
          opt_num(obj, path, "amplitude_deg", rad2deg(sc.pitch_amplitude)));
      sc.pitch_period = opt_num(obj, path, "period", sc.pitch_period);
      sc.hold_position = opt_vec3(obj, path, "position", sc.hold_position);
      sc.initial.p = sc.hold_position;
      break;
    }
    case ScenarioKind::HoverHold: {
      sc.hold_position = opt_vec3(obj, path, "target", sc.hold_position);
      sc.hold_pitch =
          deg2rad(opt_num(obj, path, "pitch_deg", rad2deg(sc.hold_pitch)));
      sc.hold_yaw =
          deg2rad(opt_num(obj, path, "yaw_deg", rad2deg(sc.hold_yaw)));
      const Vec3 dp = opt_vec3(obj, path, "initial_offset", Vec3(0.2, 0.2, 0.2));
      const Vec3 de_deg =
          opt_vec3(obj, path, "initial_euler_offset_deg", Vec3(10, 10, 10));
      sc.initial.p = sc.hold_position + dp;
      sc.initial.phi = EulerZYX::from_vec(deg2rad(1.0) * de_deg +
                                          Vec3(0.0, sc.hold_pitch, sc.hold_yaw));
      break;
    }
    case ScenarioKind::PerchPush: {
      PerchSetup& perch = sc.perch.emplace();
      sc.initial.p = opt_vec3(obj, path, "start", Vec3(0.0, 0.0, 1.0));
      perch.site_point = opt_vec3(obj, path, "site_point", perch.site_point);
      perch.site_pitch = deg2rad(
          opt_num(obj, path, "site_pitch_deg", rad2deg(perch.site_pitch)));
      perch.site_yaw = deg2rad(
          opt_num(obj, path, "site_yaw_deg", rad2deg(perch.site_yaw)));
      perch.attach_radius =
          opt_num(obj, path, "attach_radius", perch.attach_radius);
      perch.align_tol =
          deg2rad(opt_num(obj, path, "align_tol_deg", rad2deg(perch.align_tol)));
      perch.hold_thrust = opt_num(obj, path, "hold_thrust", perch.hold_thrust);
      perch.push_thrust = opt_num(obj, path, "push_thrust", perch.push_thrust);
      perch.push_delay = opt_num(obj, path, "push_delay", perch.push_delay);
      perch.phase_duration =
          opt_num(obj, path, "phase_duration", perch.phase_duration);
      // Cart guide runs along the horizontal projection of the surface normal.
      perch.cart.axis = Vec3(std::cos(perch.site_yaw), std::sin(perch.site_yaw), 0.0);
      if (obj.contains("cart")) {
        const json& cart = obj.at("cart");
        const std::string cart_path = join_path(path, "cart");
        reject_unknown(cart, cart_path,
                       {"mass", "static_friction", "kinetic_friction", "axis"});
        perch.cart.mass = opt_num(cart, cart_path, "mass", perch.cart.mass);
        perch.cart.static_friction = opt_num(cart, cart_path, "static_friction",
                                             perch.cart.static_friction);
        perch.cart.kinetic_friction = opt_num(
            cart, cart_path, "kinetic_friction", perch.cart.kinetic_friction);
        perch.cart.axis = opt_vec3(cart, cart_path, "axis", perch.cart.axis);
      }
      break;
    }
  }

  if (obj.contains("initial"))
    parse_initial(obj.at("initial"), join_path(path, "initial"), sc.initial);
  if (obj.contains("thresholds"))
    parse_thresholds(obj.at("thresholds"), join_path(path, "thresholds"),
                     bounds);

  sc.validate();
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;

  Scenario square;
  square.name = "square_xy";
  square.kind = ScenarioKind::SquareXY;
  square.duration = 22.0;
  square.hold_position = Vec3(0.0, 0.0, 1.0);
  square.initial.p = square.hold_position;
  cfg.scenarios["square_xy"] = square;
  cfg.thresholds["square_xy"] = {{"max_pitch_deg", 0.5},
                                 {"min_eta_range_deg", 0.5},
                                 {"warmup_s", 2.0},
                                 {"max_pos_err", 0.05}};

  Scenario sweep;
  sweep.name = "pitch_sweep";
  sweep.kind = ScenarioKind::PitchSweep;
  sweep.duration = 16.0;
  sweep.initial.p = sweep.hold_position;
  cfg.scenarios["pitch_sweep"] = sweep;
  cfg.thresholds["pitch_sweep"] = {{"max_pos_err", 0.02},
                                   {"min_peak_pitch_deg", 59.5}};

  Scenario hold;
  hold.name = "hover_hold";
  hold.kind = ScenarioKind::HoverHold;
  hold.duration = 10.0;
  hold.initial.p = hold.hold_position + Vec3(0.2, 0.2, 0.2);
  hold.initial.phi = EulerZYX{deg2rad(10.0), deg2rad(10.0), deg2rad(10.0)};
  cfg.scenarios["hover_hold"] = hold;
  cfg.thresholds["hover_hold"] = {{"settle_s", 8.0},
                                  {"settle_err", 1e-3},
                                  {"max_saturations", 0.5}};

  Scenario perch;
  perch.name = "perch_push";
  perch.kind = ScenarioKind::PerchPush;
  perch.duration = 17.0;
  perch.initial.p = Vec3(0.0, 0.0, 1.0);
  perch.perch.emplace();
  perch.perch->cart.axis =
      Vec3(std::cos(perch.perch->site_yaw), std::sin(perch.perch->site_yaw), 0.0);
  cfg.scenarios["perch_push"] = perch;
  cfg.thresholds["perch_push"] = {{"require_attach", 0.5},
                                  {"min_cart_disp", 0.1}};

  return cfg;
}

RunConfig RunConfig::from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("", "config root must be an object");
  reject_unknown(root, "",
                 {"vehicle", "gains", "controller", "simulation", "scenarios"});

  RunConfig cfg = defaults();

  parse_vehicle(require_key(root, "", "vehicle"), "vehicle", cfg.vehicle);
  parse_gains(require_key(root, "", "gains"), "gains", cfg.gains);

  if (root.contains("controller"))
    parse_controller(root.at("controller"), "controller", cfg.controller);

  if (root.contains("simulation")) {
    const json& sim = root.at("simulation");
    reject_unknown(sim, "simulation", {"plant_dt", "control_dt"});
    cfg.plant_dt = opt_num(sim, "simulation", "plant_dt", cfg.plant_dt);
    cfg.control_dt = opt_num(sim, "simulation", "control_dt", cfg.control_dt);
  }
  for (auto& [name, sc] : cfg.scenarios) {
    sc.plant_dt = cfg.plant_dt;
    sc.control_dt = cfg.control_dt;
  }

  if (root.contains("scenarios")) {
    const json& scen = root.at("scenarios");
    if (!scen.is_object())
      throw ConfigError("scenarios", "must be an object");
    for (const auto& [name, block] : scen.items()) {
      const std::string path = join_path("scenarios", name);
      auto it = cfg.scenarios.find(name);
      if (it == cfg.scenarios.end())
        throw ConfigError(path, "unknown scenario");
      parse_scenario(block, path, it->second, cfg.thresholds.at(name));
    }
  }

  for (auto& [name, sc] : cfg.scenarios) sc.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return from_json(root);
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("", "override must look like path.to.key=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  json* node = &root;
  size_t begin = 0;
  std::vector<std::string> keys;
  while (begin <= path.size()) {
    const size_t dot = path.find('.', begin);
    const std::string key =
        path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) throw ConfigError("", "empty key in override: " + spec);
    keys.push_back(key);
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  for (size_t i = 0; i + 1 < keys.size(); ++i) node = &((*node)[keys[i]]);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // keep as string
  }
  (*node)[keys.back()] = parsed;
}

namespace {

double max_pos_error(const SimulationLog& log, double t_min = 0.0) {
  double worst = 0.0;
  for (const LogRow& row : log.rows) {
    if (row.t < t_min || row.attach_flag) continue;
    worst = std::max(worst, (row.p - row.ref_p).norm());
  }
  return worst;
}

}  // namespace

std::vector<ThresholdCheck> evaluate_checks(
    const SimulationLog& log, const Scenario& scenario,
    const std::map<std::string, double>& bounds) {
  std::vector<ThresholdCheck> checks;
  const auto bound = [&bounds](const std::string& key) {
    return bounds.at(key);
  };
  const auto add = [&checks](const std::string& name, double value, double b,
                             const std::string& op) {
    const bool pass = op == "lt" ? value < b : value > b;
    checks.push_back({name, value, b, op, pass});
  };

  add("aborted", log.aborted ? 1.0 : 0.0, 0.5, "lt");
  if (log.rows.empty()) return checks;

  switch (scenario.kind) {
    case ScenarioKind::SquareXY: {
      const double warmup = bound("warmup_s");
      double max_pitch = 0.0, eta_min = 0.0, eta_max = 0.0;
      bool first = true;
      for (const LogRow& row : log.rows) {
        if (row.t < warmup) continue;
        max_pitch = std::max(max_pitch, std::abs(row.phi.y()));
        if (first) {
          eta_min = eta_max = row.eta;
          first = false;
        } else {
          eta_min = std::min(eta_min, row.eta);
          eta_max = std::max(eta_max, row.eta);
        }
      }
      add("max_pitch_deg", rad2deg(max_pitch), bound("max_pitch_deg"), "lt");
      add("min_eta_range_deg", rad2deg(eta_max - eta_min),
          bound("min_eta_range_deg"), "gt");
      add("max_pos_err", max_pos_error(log, warmup), bound("max_pos_err"),
          "lt");
      break;
    }
    case ScenarioKind::PitchSweep: {
      double peak_pitch = 0.0;
      for (const LogRow& row : log.rows)
        peak_pitch = std::max(peak_pitch, std::abs(row.phi.y()));
      add("max_pos_err", max_pos_error(log), bound("max_pos_err"), "lt");
      add("min_peak_pitch_deg", rad2deg(peak_pitch),
          bound("min_peak_pitch_deg"), "gt");
      break;
    }
    case ScenarioKind::HoverHold: {
      const double settle = bound("settle_s");
      double worst = 0.0;
      for (const LogRow& row : log.rows) {
        if (row.t < settle) continue;
        worst = std::max({worst, std::abs(row.e_u),
                          row.e_f.cwiseAbs().maxCoeff()});
      }
      add("settle_err", worst, bound("settle_err"), "lt");
      add("max_saturations", static_cast<double>(log.saturation_count),
          bound("max_saturations"), "lt");
      break;
    }
    case ScenarioKind::PerchPush: {
      add("require_attach", log.attached() ? 1.0 : 0.0,
          bound("require_attach"), "gt");
      double disp = 0.0;
      if (log.attached() && scenario.perch) {
        const Vec3 axis = scenario.perch->cart.axis;
        Vec3 p_attach = log.rows.back().p;
        for (const LogRow& row : log.rows) {
          if (row.attach_flag) {
            p_attach = row.p;
            break;
          }
        }
        disp = (log.rows.back().p - p_attach).dot(axis);
      }
      add("min_cart_disp", disp, bound("min_cart_disp"), "gt");
      break;
    }
  }
  return checks;
}

nlohmann::json summary_json(const SimulationLog& log, const Scenario& scenario,
                            const std::vector<ThresholdCheck>& checks) {
  json j;
  j["scenario"] = scenario.name;
  j["rows"] = log.rows.size();
  j["duration"] = scenario.duration;
  j["plant_dt"] = scenario.plant_dt;
  j["control_dt"] = scenario.control_dt;
  j["saturation_count"] = log.saturation_count;
  j["aborted"] = log.aborted;
  if (log.aborted) j["abort_reason"] = log.abort_reason;
  if (log.attached()) j["attach_time"] = log.attach_time;

  if (!log.rows.empty()) {
    const LogRow& last = log.rows.back();
    j["terminal"]["t"] = last.t;
    j["terminal"]["e_u"] = last.e_u;
    j["terminal"]["e_f"] = {last.e_f(0), last.e_f(1), last.e_f(2),
                            last.e_f(3), last.e_f(4)};
    double max_F = 0.0;
    for (const LogRow& row : log.rows)
      max_F = std::max(max_F, row.F.maxCoeff());
    j["max_rotor_thrust"] = max_F;
  }

  json arr = json::array();
  bool all_pass = true;
  for (const ThresholdCheck& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"bound", c.bound},
                   {"op", c.op},
                   {"pass", c.pass}});
    all_pass = all_pass && c.pass;
  }
  j["checks"] = arr;
  j["pass"] = all_pass;
  return j;
}

}  // namespace tiltsim
