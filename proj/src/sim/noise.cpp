#include "dob/noise.hpp"

#include <cmath>
#include <numbers>

#include "dob/error.hpp"

namespace dob {

void NoiseModel::validate() const {
  if (!(velocity.sigma >= 0.0) || !(velocity.resolution >= 0.0))
    throw Error(ErrorCode::InvalidParam, "velocity noise parameters must be >= 0");
  if (velocity.kind == VelocityNoise::Kind::EncoderQuantization && !(velocity.resolution > 0.0))
    throw Error(ErrorCode::InvalidParam, "encoder resolution must be > 0");
  if (!(acceleration.sigma >= 0.0) || !std::isfinite(acceleration.bias))
    throw Error(ErrorCode::InvalidParam, "acceleration noise parameters must be finite, sigma >= 0");
}

std::string_view to_string(VelocityNoise::Kind k) {
  switch (k) {
    case VelocityNoise::Kind::None: return "none";
    case VelocityNoise::Kind::WhiteGaussian: return "white";
    case VelocityNoise::Kind::EncoderQuantization: return "encoder";
  }
  return "unknown";
}

std::string_view to_string(AccelNoise::Kind k) {
  switch (k) {
    case AccelNoise::Kind::None: return "none";
    case AccelNoise::Kind::WhiteGaussian: return "white";
    case AccelNoise::Kind::GaussianWithBias: return "biased";
  }
  return "unknown";
}

std::optional<VelocityNoise::Kind> parse_velocity_noise(std::string_view s) {
  if (s == "none") return VelocityNoise::Kind::None;
  if (s == "white") return VelocityNoise::Kind::WhiteGaussian;
  if (s == "encoder") return VelocityNoise::Kind::EncoderQuantization;
  return std::nullopt;
}

std::optional<AccelNoise::Kind> parse_accel_noise(std::string_view s) {
  if (s == "none") return AccelNoise::Kind::None;
  if (s == "white") return AccelNoise::Kind::WhiteGaussian;
  if (s == "biased") return AccelNoise::Kind::GaussianWithBias;
  return std::nullopt;
}

double NoiseSource::uniform() {
  // 53 random mantissa bits, shifted away from zero.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NoiseSource::standard_normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

MeasuredMotion measure_motion(const VelocityNoise& model, double position, double velocity,
                              double sample_time, EncoderState& encoder, NoiseSource& rng) {
  switch (model.kind) {
    case VelocityNoise::Kind::None:
      return {position, velocity};
    case VelocityNoise::Kind::WhiteGaussian:
      return {position, velocity + model.sigma * rng.standard_normal()};
    case VelocityNoise::Kind::EncoderQuantization: {
      const double counted = std::floor(position / model.resolution) * model.resolution;
      const double previous = encoder.primed ? encoder.last_position : counted;
      encoder.primed = true;
      encoder.last_position = counted;
      return {counted, (counted - previous) / sample_time};
    }
  }
  return {position, velocity};
}

double measure_acceleration(const AccelNoise& model, double acceleration, NoiseSource& rng) {
  switch (model.kind) {
    case AccelNoise::Kind::None: return acceleration;
    case AccelNoise::Kind::WhiteGaussian: return acceleration + model.sigma * rng.standard_normal();
    case AccelNoise::Kind::GaussianWithBias:
      return acceleration + model.bias + model.sigma * rng.standard_normal();
  }
  return acceleration;
}

}  // namespace dob
