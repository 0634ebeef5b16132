#include "dob/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "dob/error.hpp"

namespace dob {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void config_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::Config, where + ": " + msg);
}

// One section of the file; tracks which keys were consumed.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key) {
    used_.insert(key);
    auto it = tree_->find(key);
    if (!it->second.empty()) config_error(where(key), "nested keys are not allowed");
    return it->second.data();
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  double number(const std::string& key) {
    if (!has(key)) config_error(where(key), "required key missing");
    const std::string s = text(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      config_error(where(key), "not a number: '" + s + "'");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    if (s == "true") return true;
    if (s == "false") return false;
    config_error(where(key), "expected true or false, got '" + s + "'");
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      config_error(where(key), "not a non-negative integer: '" + s + "'");
    return v;
  }

  template <class T, class Parse>
  T choice(const std::string& key, T fallback, Parse parse) {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    auto v = parse(s);
    if (!v) config_error(where(key), "unknown value '" + s + "'");
    return *v;
  }

  template <class T, class Parse>
  T required_choice(const std::string& key, Parse parse) {
    if (!has(key)) config_error(where(key), "required key missing");
    return choice<T>(key, T{}, parse);
  }

  Signal signal(const std::string& key) {
    Signal s;
    s.shape = choice(key, SignalShape::None, parse_signal_shape);
    s.amplitude = number(key + "_amplitude", s.amplitude);
    s.start = number(key + "_start", s.start);
    s.frequency = number(key + "_frequency", s.frequency);
    s.held = boolean(key + "_held", s.held);
    return s;
  }

  void reject_unused() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_)
      if (!used_.count(key)) config_error(where(key), "unknown key");
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* flag(bool b) { return b ? "true" : "false"; }

void write_signal(std::ostream& out, const std::string& key, const Signal& s) {
  out << key << " = " << to_string(s.shape) << '\n'
      << key << "_amplitude = " << num(s.amplitude) << '\n'
      << key << "_start = " << num(s.start) << '\n'
      << key << "_frequency = " << num(s.frequency) << '\n'
      << key << "_held = " << flag(s.held) << '\n';
}

}  // namespace

SimConfig parse_scenario(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    config_error("line " + std::to_string(e.line()), e.message());
  }
  static const std::set<std::string> known = {"plant", "observer", "controller", "environment", "noise", "run"};
  for (const auto& [name, sec] : root) {
    if (!known.count(name)) config_error("[" + name + "]", "unknown section");
    if (sec.empty() && !sec.data().empty()) config_error(name, "key outside any section");
  }

  SimConfig c;
  Section plant("plant", child(root, "plant"));
  c.plant.inertia = plant.number("J_m");
  c.plant.torque_constant = plant.number("K_tau");
  c.plant.nominal_inertia = plant.number("J_mn");
  c.plant.nominal_torque_constant = plant.number("K_taun");
  c.plant.sample_time = plant.number("T_s");

  Section obs("observer", child(root, "observer"));
  c.observer.kind = obs.required_choice<ObserverKind>("kind", parse_observer_kind);
  c.observer.bandwidth = obs.number("g_dob");
  if (obs.has("g_rtob")) c.observer.force_bandwidth = obs.number("g_rtob");
  if (obs.has("rfob_kind"))
    c.force_observer_kind = obs.choice("rfob_kind", ObserverKind::None, parse_observer_kind);
  c.identification = obs.choice("tau_id", c.identification, parse_identification);

  Section ctl("controller", child(root, "controller"));
  c.mode = ctl.required_choice<ControlMode>("mode", parse_control_mode);
  c.kp = ctl.number("K_p", c.kp);
  c.kd = ctl.number("K_D", c.kd);
  c.force_gain = ctl.number("C_f", c.force_gain);
  c.accel_feedforward = ctl.boolean("accel_feedforward", c.accel_feedforward);
  c.reference = ctl.signal("reference");

  Section env("environment", child(root, "environment"));
  c.disturbance = env.signal("disturbance");
  if (env.has("K_env") || env.has("D_env") || env.has("contact_pos")) {
    Environment e;
    e.stiffness = env.number("K_env");
    e.damping = env.number("D_env", e.damping);
    e.contact_position = env.number("contact_pos", e.contact_position);
    c.environment = e;
  }

  Section noise("noise", child(root, "noise"));
  c.noise.velocity.kind = noise.choice("velocity", c.noise.velocity.kind, parse_velocity_noise);
  c.noise.velocity.sigma = noise.number("velocity_sigma", 0.0);
  c.noise.velocity.resolution = noise.number("encoder_resolution", 0.0);
  c.noise.acceleration.kind = noise.choice("accel", c.noise.acceleration.kind, parse_accel_noise);
  c.noise.acceleration.sigma = noise.number("accel_sigma", 0.0);
  c.noise.acceleration.bias = noise.number("accel_bias", 0.0);
  c.noise.velocity_injection = noise.signal("velocity_injection");
  c.noise.acceleration_injection = noise.signal("accel_injection");

  Section run("run", child(root, "run"));
  c.duration = run.number("duration");
  c.substeps = static_cast<int>(run.integer("substeps", static_cast<std::uint64_t>(c.substeps)));
  c.seed = run.integer("seed", c.seed);

  for (const Section* s : {&plant, &obs, &ctl, &env, &noise, &run}) s->reject_unused();
  return c;
}

SimConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open scenario '" + path + "'");
  return parse_scenario(in);
}

void write_scenario(std::ostream& out, const SimConfig& c) {
  out << "[plant]\n"
      << "J_m = " << num(c.plant.inertia) << '\n'
      << "K_tau = " << num(c.plant.torque_constant) << '\n'
      << "J_mn = " << num(c.plant.nominal_inertia) << '\n'
      << "K_taun = " << num(c.plant.nominal_torque_constant) << '\n'
      << "T_s = " << num(c.plant.sample_time) << "\n\n";

  out << "[observer]\n"
      << "kind = " << to_string(c.observer.kind) << '\n'
      << "g_dob = " << num(c.observer.bandwidth) << '\n';
  if (c.observer.force_bandwidth) out << "g_rtob = " << num(*c.observer.force_bandwidth) << '\n';
  if (c.force_observer_kind) out << "rfob_kind = " << to_string(*c.force_observer_kind) << '\n';
  out << "tau_id = " << to_string(c.identification) << "\n\n";

  out << "[controller]\n"
      << "mode = " << to_string(c.mode) << '\n'
      << "K_p = " << num(c.kp) << '\n'
      << "K_D = " << num(c.kd) << '\n'
      << "C_f = " << num(c.force_gain) << '\n'
      << "accel_feedforward = " << flag(c.accel_feedforward) << '\n';
  write_signal(out, "reference", c.reference);

  out << "\n[environment]\n";
  if (c.environment) {
    out << "K_env = " << num(c.environment->stiffness) << '\n'
        << "D_env = " << num(c.environment->damping) << '\n'
        << "contact_pos = " << num(c.environment->contact_position) << '\n';
  }
  write_signal(out, "disturbance", c.disturbance);

  out << "\n[noise]\n"
      << "velocity = " << to_string(c.noise.velocity.kind) << '\n'
      << "velocity_sigma = " << num(c.noise.velocity.sigma) << '\n'
      << "encoder_resolution = " << num(c.noise.velocity.resolution) << '\n'
      << "accel = " << to_string(c.noise.acceleration.kind) << '\n'
      << "accel_sigma = " << num(c.noise.acceleration.sigma) << '\n'
      << "accel_bias = " << num(c.noise.acceleration.bias) << '\n';
  write_signal(out, "velocity_injection", c.noise.velocity_injection);
  write_signal(out, "accel_injection", c.noise.acceleration_injection);

  out << "\n[run]\n"
      << "duration = " << num(c.duration) << '\n'
      << "substeps = " << c.substeps << '\n'
      << "seed = " << c.seed << '\n';
}

bool same_config(const SimConfig& a, const SimConfig& b) {
  auto plant_eq = [](const PlantParams& x, const PlantParams& y) {
    return x.inertia == y.inertia && x.torque_constant == y.torque_constant &&
           x.nominal_inertia == y.nominal_inertia && x.nominal_torque_constant == y.nominal_torque_constant &&
           x.sample_time == y.sample_time;
  };
  return plant_eq(a.plant, b.plant) && a.observer.kind == b.observer.kind &&
         a.observer.bandwidth == b.observer.bandwidth && a.observer.force_bandwidth == b.observer.force_bandwidth &&
         a.force_observer_kind == b.force_observer_kind && a.identification == b.identification &&
         a.mode == b.mode && a.kp == b.kp && a.kd == b.kd && a.force_gain == b.force_gain &&
         a.accel_feedforward == b.accel_feedforward && a.reference == b.reference &&
         a.disturbance == b.disturbance && a.environment == b.environment && a.noise == b.noise &&
         a.duration == b.duration && a.substeps == b.substeps && a.seed == b.seed;
}

}  // namespace dob
