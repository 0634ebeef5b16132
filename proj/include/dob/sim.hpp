#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dob/models.hpp"
#include "dob/noise.hpp"
#include "dob/signal.hpp"

namespace dob {

enum class ControlMode { Position, Force };

/// Feedforward of the internal disturbance into the reaction-force observer.
enum class Identification {
  Exact,  // internal disturbance known exactly: the force observer sees only the contact torque
  Zero,   // nothing identified: every internal disturbance leaks into the force estimate
};

std::string_view to_string(ControlMode m);
std::string_view to_string(Identification i);
std::optional<ControlMode> parse_control_mode(std::string_view s);
std::optional<Identification> parse_identification(std::string_view s);

/// Unilateral spring-damper: tau_env = K (q - q_c) + D qdot while q > q_c.
struct Environment {
  double stiffness = 100.0;      // N m / rad
  double damping = 1.0;          // N m s / rad
  double contact_position = 0.0; // rad

  double torque(double q, double qdot) const {
    return q > contact_position ? stiffness * (q - contact_position) + damping * qdot : 0.0;
  }

  friend bool operator==(const Environment&, const Environment&) = default;
};

struct SimConfig {
  PlantParams plant;
  ObserverConfig observer;
  /// Kind of the reaction-force observer; defaults to the inner observer's kind.
  std::optional<ObserverKind> force_observer_kind;
  Identification identification = Identification::Exact;

  ControlMode mode = ControlMode::Position;
  double kp = 2500.0;         // 1/s^2
  double kd = 125.0;          // 1/s
  double force_gain = 150.0;  // C_f: qdd_des = C_f (tau_des - tau_ext_hat)
  bool accel_feedforward = true;

  Signal reference;           // q_des [rad] or tau_des [N m]
  Signal disturbance;         // tau_d [N m]
  std::optional<Environment> environment;
  NoiseModel noise;

  double duration = 1.0;      // s
  int substeps = 10;
  std::uint64_t seed = 0;

  /// Throws InvalidParam on any violated invariant.
  void validate() const;
  ObserverKind rfob_kind() const;
};

enum class SimStatus { Completed, Diverged };

/// Sampled time series, one row per controller sample t_k = k T_s.
///
/// qddot is the mean plant acceleration over [t_k, t_{k+1}); tau_env is the
/// contact torque at t_k. env_work is the cumulative work done by the plant on
/// the environment up to t_k (diagnostic; not part of the CSV).
struct SimTrace {
  std::vector<double> t, q, qdot, qddot, current, current_des, current_dis, tau_dis_hat,
      tau_ext_hat, tau_env, meas_vel, meas_acc, env_work;
  SimStatus status = SimStatus::Completed;
  std::optional<std::size_t> diverged_index;

  std::size_t size() const { return t.size(); }
};

inline constexpr double kDivergenceBound = 1e12;

SimTrace simulate_position(const SimConfig& cfg);
SimTrace simulate_force(const SimConfig& cfg);
SimTrace simulate(const SimConfig& cfg);

inline constexpr std::string_view kTraceHeader =
    "t,q,qdot,qddot,I,I_des,I_dis,tau_dis_hat,tau_ext_hat,tau_env,meas_vel,meas_acc";

/// CSV with kTraceHeader, 17 significant digits.
void write_csv(std::ostream& os, const SimTrace& trace);

struct SimSummary {
  bool diverged = false;
  double diverged_time = 0.0;
  bool settled = false;
  bool growing = false;
  double steady_state_error = 0.0;  // mean |error| over the final 10 %
  double rms_current = 0.0;
};

/// Tracking error is q_des - q (position) or tau_des - tau_env (force).
std::vector<double> tracking_error(const SimConfig& cfg, const SimTrace& trace);
/// Distance from the commanded equilibrium: q_des - q, or q_c + tau_des/K - q.
std::vector<double> excursion(const SimConfig& cfg, const SimTrace& trace);

SimSummary summarize(const SimConfig& cfg, const SimTrace& trace);

/// Longest run of consecutive samples whose signs strictly alternate.
std::size_t longest_alternating_run(std::span<const double> values);

/// Peak |v| over `windows` equal consecutive windows is strictly increasing
/// and the last peak is at least twice the first.
bool amplitude_growing(std::span<const double> values, std::size_t windows = 4);

double rms(std::span<const double> values);

}  // namespace dob
