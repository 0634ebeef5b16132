#pragma once

#include <optional>
#include <string_view>

namespace dob {

enum class SignalShape { None, Step, Ramp, Sine };

std::string_view to_string(SignalShape s);
std::optional<SignalShape> parse_signal_shape(std::string_view s);

/// Scalar time signal that switches on at `start`.
///
///   step: amplitude                      ramp: amplitude * (t - start)
///   sine: amplitude * sin(frequency * (t - start)),  frequency in rad/s
///
/// A `held` signal is sampled at t_k and kept constant over the sample
/// interval (the simulator applies it synchronously with the controller).
struct Signal {
  SignalShape shape = SignalShape::None;
  double amplitude = 0.0;
  double start = 0.1;
  double frequency = 0.0;
  bool held = false;

  double value(double t) const;
  double rate(double t) const;
  double acceleration(double t) const;

  bool active() const { return shape != SignalShape::None; }

  friend bool operator==(const Signal&, const Signal&) = default;
};

inline Signal step_signal(double amplitude, double start = 0.1) {
  return {SignalShape::Step, amplitude, start, 0.0, false};
}

inline Signal sine_signal(double amplitude, double frequency, double start = 0.0) {
  return {SignalShape::Sine, amplitude, start, frequency, false};
}

}  // namespace dob
