#pragma once

#include <optional>
#include <string_view>

#include "dob/rational.hpp"

namespace dob {

/// Servo plant: true and nominal inertia / torque constant plus sampling time.
struct PlantParams {
  double inertia = 0.01;                  // J_m [kg m^2]
  double torque_constant = 0.25;          // K_tau [N m / A]
  double nominal_inertia = 0.01;          // J_mn [kg m^2]
  double nominal_torque_constant = 0.25;  // K_taun [N m / A]
  double sample_time = 1e-3;              // T_s [s]

  /// alpha = (J_mn K_tau) / (J_m K_taun): nominal-to-true gain mismatch.
  double alpha() const {
    return (nominal_inertia * torque_constant) / (inertia * nominal_torque_constant);
  }

  /// Throws InvalidParam unless every field is strictly positive and finite.
  void validate() const;

  /// Copy with J_mn rescaled so that alpha() == target.
  PlantParams with_alpha(double target) const;
};

enum class ObserverKind {
  None,          // no observer; L == 0
  Velocity,      // velocity measurement, backward-difference acceleration
  Acceleration,  // accelerometer
};

std::string_view to_string(ObserverKind k);
std::optional<ObserverKind> parse_observer_kind(std::string_view s);

struct ObserverConfig {
  ObserverKind kind = ObserverKind::Velocity;
  double bandwidth = 750.0;                    // g_dob [rad/s]
  std::optional<double> force_bandwidth;       // g_rtob [rad/s], force control only

  void validate() const;
};

/// Open loop, sensitivity, complementary sensitivity and the measurement-noise
/// path of one observer loop.
///
/// `noise` maps the sensor noise (velocity noise for the velocity observer,
/// accelerometer noise for the acceleration observer) to the plant
/// acceleration.
struct LoopSet {
  Rational open_loop;
  Rational sensitivity;
  Rational complementary;
  Rational noise;
  double loop_gain = 0.0;  // k = alpha * g * T_s
};

/// Backward-Euler low-pass g/(s+g):  Q(z) = g T z / ((1 + g T) z - 1).
Rational q_filter(double bandwidth, double sample_time);

LoopSet velocity_loop(const PlantParams& p, double bandwidth);
LoopSet acceleration_loop(const PlantParams& p, double bandwidth);
LoopSet build_loop(const PlantParams& p, const ObserverConfig& obs);

/// Transfer functions of the observer from its two inputs.
///
/// The estimate is tau_hat = from_torque * (K_taun I) + from_acceleration * qdd_n,
/// where qdd_n is the acceleration the observer sees. For the velocity observer
/// it is built from the two-path realisation
///   Q (K_taun I + J_mn g qdot) - J_mn g qdot,  qdot = (T z / (z - 1)) qdd_n,
/// so the identity tau_hat = Q (K_taun I - J_mn qdd_n) can be checked
/// independently of how the estimate is written down.
struct ObserverPaths {
  Rational from_torque;
  Rational from_acceleration;
};
ObserverPaths observer_paths(const PlantParams& p, const ObserverConfig& obs);

/// Inner closed loop qdd(z) = G(z) qdd_des(z) with the observer compensating.
Rational inner_command_path(const PlantParams& p, const ObserverConfig& obs);

/// How the position sample is obtained from the acceleration sequence.
enum class PositionIntegrator {
  BackwardEuler,  // q = (T z / (z-1)) qdot   (fixed by the discrete model)
  ZeroOrderHold,  // q = exact sampled double integrator, T^2 (z+1) / (2 (z-1)^2)
};

/// Characteristic polynomial of the PD position loop around the inner
/// observer loop (denominator of 1 + G C without cancellation):
///   qdd_des = K_p (q_des - q) + K_D (qdot_des - qdot).
Poly position_charpoly(const PlantParams& p, const ObserverConfig& obs, double kp, double kd,
                       PositionIntegrator integrator = PositionIntegrator::BackwardEuler);

}  // namespace dob
