#include "dob/signal.hpp"

#include <cmath>

namespace dob {

namespace {
// Sample instants are k*T_s; keep a step scheduled at such an instant on it.
constexpr double kEdgeSlack = 1e-12;
}

std::string_view to_string(SignalShape s) {
  switch (s) {
    case SignalShape::None: return "none";
    case SignalShape::Step: return "step";
    case SignalShape::Ramp: return "ramp";
    case SignalShape::Sine: return "sine";
  }
  return "unknown";
}

std::optional<SignalShape> parse_signal_shape(std::string_view s) {
  if (s == "none") return SignalShape::None;
  if (s == "step") return SignalShape::Step;
  if (s == "ramp") return SignalShape::Ramp;
  if (s == "sine") return SignalShape::Sine;
  return std::nullopt;
}

double Signal::value(double t) const {
  if (shape == SignalShape::None || t + kEdgeSlack < start) return 0.0;
  const double tau = t - start;
  switch (shape) {
    case SignalShape::Step: return amplitude;
    case SignalShape::Ramp: return amplitude * tau;
    case SignalShape::Sine: return amplitude * std::sin(frequency * tau);
    case SignalShape::None: break;
  }
  return 0.0;
}

double Signal::rate(double t) const {
  if (shape == SignalShape::None || t + kEdgeSlack < start) return 0.0;
  const double tau = t - start;
  switch (shape) {
    case SignalShape::Ramp: return amplitude;
    case SignalShape::Sine: return amplitude * frequency * std::cos(frequency * tau);
    default: return 0.0;
  }
}

double Signal::acceleration(double t) const {
  if (shape != SignalShape::Sine || t + kEdgeSlack < start) return 0.0;
  return -amplitude * frequency * frequency * std::sin(frequency * (t - start));
}

}  // namespace dob
