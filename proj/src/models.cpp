#include "dob/models.hpp"

#include <cmath>
#include <string>

#include "dob/error.hpp"

namespace dob {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::InvalidParam, std::string(name) + " must be positive and finite");
}

}  // namespace

void PlantParams::validate() const {
  require_positive(inertia, "J_m");
  require_positive(torque_constant, "K_tau");
  require_positive(nominal_inertia, "J_mn");
  require_positive(nominal_torque_constant, "K_taun");
  require_positive(sample_time, "T_s");
}

PlantParams PlantParams::with_alpha(double target) const {
  require_positive(target, "alpha");
  PlantParams out = *this;
  out.nominal_inertia = target * inertia * nominal_torque_constant / torque_constant;
  return out;
}

std::string_view to_string(ObserverKind k) {
  switch (k) {
    case ObserverKind::None: return "none";
    case ObserverKind::Velocity: return "velocity";
    case ObserverKind::Acceleration: return "acceleration";
  }
  return "unknown";
}

std::optional<ObserverKind> parse_observer_kind(std::string_view s) {
  if (s == "none") return ObserverKind::None;
  if (s == "velocity") return ObserverKind::Velocity;
  if (s == "acceleration") return ObserverKind::Acceleration;
  return std::nullopt;
}

void ObserverConfig::validate() const {
  if (kind != ObserverKind::None) require_positive(bandwidth, "g_dob");
  if (force_bandwidth) require_positive(*force_bandwidth, "g_rtob");
}

Rational q_filter(double bandwidth, double sample_time) {
  require_positive(bandwidth, "g");
  require_positive(sample_time, "T_s");
  const double gt = bandwidth * sample_time;
  return Rational(Poly({gt, 0.0}), Poly({1.0 + gt, -1.0}));
}

LoopSet velocity_loop(const PlantParams& p, double bandwidth) {
  p.validate();
  require_positive(bandwidth, "g_dob");
  const double k = p.alpha() * bandwidth * p.sample_time;
  LoopSet out;
  out.loop_gain = k;
  out.open_loop = Rational(Poly({k}), Poly({1.0, -1.0}));
  auto fb = feedback(out.open_loop);
  out.sensitivity = fb.sensitivity;
  out.complementary = fb.complementary;
  // Backward difference of the velocity noise, shaped by T.
  out.noise = Rational(Poly({-1.0 / p.sample_time, 1.0 / p.sample_time}), Poly({1.0})) * out.complementary;
  return out;
}

LoopSet acceleration_loop(const PlantParams& p, double bandwidth) {
  p.validate();
  require_positive(bandwidth, "g_dob");
  const double k = p.alpha() * bandwidth * p.sample_time;
  LoopSet out;
  out.loop_gain = k;
  out.open_loop = Rational(Poly({k, 0.0}), Poly({1.0, -1.0}));
  auto fb = feedback(out.open_loop);
  out.sensitivity = fb.sensitivity;
  out.complementary = fb.complementary;
  out.noise = (-1.0) * out.complementary;
  return out;
}

LoopSet build_loop(const PlantParams& p, const ObserverConfig& obs) {
  obs.validate();
  switch (obs.kind) {
    case ObserverKind::Velocity: return velocity_loop(p, obs.bandwidth);
    case ObserverKind::Acceleration: return acceleration_loop(p, obs.bandwidth);
    case ObserverKind::None: break;
  }
  p.validate();
  LoopSet out;
  out.open_loop = Rational::constant(0.0);
  auto fb = feedback(out.open_loop);
  out.sensitivity = fb.sensitivity;
  out.complementary = fb.complementary;
  out.noise = Rational::constant(0.0);
  return out;
}

ObserverPaths observer_paths(const PlantParams& p, const ObserverConfig& obs) {
  p.validate();
  obs.validate();
  const double jn = p.nominal_inertia;
  if (obs.kind == ObserverKind::None) return {Rational::constant(0.0), Rational::constant(0.0)};
  const Rational q = q_filter(obs.bandwidth, p.sample_time);
  if (obs.kind == ObserverKind::Acceleration) return {q, (-jn) * q};

  // Velocity: tau_hat = Q (u + J g qdot) - J g qdot, qdot = T z/(z-1) qdd_n.
  const double g = obs.bandwidth;
  const Rational inverse_difference(Poly({p.sample_time, 0.0}), Poly({1.0, -1.0}));
  const Rational feed = (jn * g) * inverse_difference;
  return {q, q * feed - feed};
}

Rational inner_command_path(const PlantParams& p, const ObserverConfig& obs) {
  p.validate();
  obs.validate();
  const double a = p.alpha();
  if (obs.kind == ObserverKind::None) return Rational::constant(a);
  const double gt = obs.bandwidth * p.sample_time;
  const double k = a * gt;
  const Poly num({a * (1.0 + gt), -a});
  if (obs.kind == ObserverKind::Velocity) return Rational(num, Poly({1.0, -(1.0 - k)}));
  return Rational(num, Poly({1.0 + k, -1.0}));
}

Poly position_charpoly(const PlantParams& p, const ObserverConfig& obs, double kp, double kd,
                       PositionIntegrator integrator) {
  if (!(kp >= 0.0) || !(kd >= 0.0)) throw Error(ErrorCode::InvalidParam, "K_p and K_D must be >= 0");
  const Rational g = inner_command_path(p, obs);
  const double t = p.sample_time;

  // PD controller seen from qdd, over the common denominator (z - 1)^2.
  Poly position_num = integrator == PositionIntegrator::BackwardEuler
                          ? Poly({t * t, 0.0})
                          : Poly({0.5 * t * t, 0.5 * t * t});
  const Poly controller_num = position_num.scaled(kp) + Poly({t, -t}).scaled(kd);
  const Poly controller_den = Poly({1.0, -1.0}) * Poly({1.0, -1.0});
  return g.den() * controller_den + g.num() * controller_num;
}

}  // namespace dob
