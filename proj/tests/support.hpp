#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>

#include "dob/sim.hpp"

namespace dob::testing {

// Plant and gains used throughout: J=0.01, K=0.25, T=1 ms, K_p=2500, K_D=125.
inline SimConfig position_config(ObserverKind kind, double g, double duration = 1.0) {
  SimConfig c;
  c.observer = {kind, g, std::nullopt};
  c.mode = ControlMode::Position;
  c.reference = step_signal(1.0);
  c.duration = duration;
  return c;
}

// Inner loop alone: no outer gains, held disturbance step of 1 N m from t = 0.
inline SimConfig disturbance_config(ObserverKind kind, double g, double duration = 0.2) {
  SimConfig c = position_config(kind, g, duration);
  c.kp = 0.0;
  c.kd = 0.0;
  c.reference = {};
  c.disturbance = step_signal(1.0, 0.0);
  c.disturbance.held = true;
  return c;
}

inline SimConfig force_config(ObserverKind kind, double stiffness, double g_rtob, double duration = 2.0) {
  SimConfig c;
  c.observer = {kind, 750.0, g_rtob};
  c.mode = ControlMode::Force;
  c.reference = step_signal(1.0);
  c.environment = Environment{stiffness, 1.0, 0.0};
  c.duration = duration;
  return c;
}

inline std::string to_csv(const SimTrace& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

// Complex amplitude of x at theta (rad/sample) over the trailing `window`
// samples. Exact when theta * window is a multiple of 2 pi.
inline std::complex<double> phasor(std::span<const double> x, double theta, std::size_t window) {
  std::complex<double> acc = 0.0;
  const std::size_t first = x.size() - window;
  for (std::size_t i = first; i < x.size(); ++i)
    acc += x[i] * std::exp(std::complex<double>(0.0, -theta * static_cast<double>(i)));
  return 2.0 * acc / static_cast<double>(window);
}

}  // namespace dob::testing
