#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "dob/signal.hpp"

namespace dob {

struct VelocityNoise {
  enum class Kind { None, WhiteGaussian, EncoderQuantization };
  Kind kind = Kind::None;
  double sigma = 0.0;       // rad/s
  double resolution = 0.0;  // encoder step [rad]

  friend bool operator==(const VelocityNoise&, const VelocityNoise&) = default;
};

struct AccelNoise {
  enum class Kind { None, WhiteGaussian, GaussianWithBias };
  Kind kind = Kind::None;
  double sigma = 0.0;  // rad/s^2
  double bias = 0.0;   // rad/s^2

  friend bool operator==(const AccelNoise&, const AccelNoise&) = default;
};

/// Sensor noise. The injection signals are deterministic additive terms on
/// the measured velocity / acceleration, used for frequency-response probing.
struct NoiseModel {
  VelocityNoise velocity;
  AccelNoise acceleration;
  Signal velocity_injection;
  Signal acceleration_injection;

  void validate() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

std::string_view to_string(VelocityNoise::Kind k);
std::string_view to_string(AccelNoise::Kind k);
std::optional<VelocityNoise::Kind> parse_velocity_noise(std::string_view s);
std::optional<AccelNoise::Kind> parse_accel_noise(std::string_view s);

/// Seedable normal source. std::normal_distribution is implementation-defined,
/// so the variate transform is done here on top of the (fully specified)
/// 64-bit Mersenne Twister.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform();
  /// Box-Muller; one variate per call.
  double standard_normal();

 private:
  std::mt19937_64 engine_;
};

struct EncoderState {
  bool primed = false;
  double last_position = 0.0;
};

struct MeasuredMotion {
  double position = 0.0;
  double velocity = 0.0;
};

/// Position and velocity as the controller sees them.
///   None          -> truth
///   WhiteGaussian -> velocity + sigma * N(0,1); position exact
///   Encoder       -> position quantised to the resolution, velocity is its
///                    backward difference over T_s
MeasuredMotion measure_motion(const VelocityNoise& model, double position, double velocity,
                              double sample_time, EncoderState& encoder, NoiseSource& rng);

/// Accelerometer reading: truth, truth + sigma N(0,1), or truth + bias + sigma N(0,1).
double measure_acceleration(const AccelNoise& model, double acceleration, NoiseSource& rng);

}  // namespace dob
