#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dob/models.hpp"
#include "dob/rational.hpp"

namespace dob {

/// Peak-gain targets |S|max <= 1/gamma_s, |T|max <= 1/gamma_t, both in (0, 1).
struct ConstraintSpec {
  double gamma_s = 0.5;
  double gamma_t = 0.5;

  void validate() const;
};

struct BodeReport {
  double numeric_integral = 0.0;  // int_{-pi}^{pi} ln|S(e^{j theta})| d theta
  double analytic_rhs = 0.0;      // -2 pi ln|1 + L(inf)|
  double abs_error = 0.0;
  std::size_t grid_points = 0;
};

inline constexpr std::size_t kMinBodeIntervals = std::size_t{1} << 14;

/// Discrete Bode sensitivity integral, checked against its closed form.
///
/// Midpoint quadrature on a mesh graded geometrically toward every zero of S
/// on the unit circle (log singularities). Requires a stable S; otherwise
/// throws UnstableSensitivity.
BodeReport bode_integral(const Rational& sensitivity, const Rational& open_loop,
                         std::size_t intervals = kMinBodeIntervals);

struct Peak {
  double theta = 0.0;      // rad/sample
  double magnitude = 0.0;
};

/// max over theta in [0, pi] of |r(e^{j theta})|: dense grid then golden-section.
Peak peak_gain(const Rational& r, std::size_t grid = 4096);

/// Largest k = alpha g T_s with |S_v|max <= 1/gamma_s and |T_v|max <= 1/gamma_t.
double constraint_max_k(const ConstraintSpec& c);

struct BandwidthLimits {
  double g_max = 0.0;       // from the peak-gain constraints
  double g_osc = 0.0;       // k = 1: sign-alternating response beyond this
  double g_unstable = 0.0;  // k = 2: unstable beyond this
};

BandwidthLimits max_bandwidth(const PlantParams& p, const ConstraintSpec& c);

enum class Response { Monotone, Oscillatory, Marginal, Unstable };
const char* to_string(Response r);

/// Velocity observer: Monotone on (0,1], Oscillatory on (1,2), Marginal at 2,
/// Unstable above. The acceleration observer is Monotone for every k > 0.
Response classify_k(double k, ObserverKind kind = ObserverKind::Velocity);

struct LocusPoint {
  double alpha = 0.0;
  std::vector<Complex> roots;  // descending magnitude, then ascending angle
  double spectral_radius = 0.0;
};

/// Roots of the position-loop characteristic polynomial for each alpha
/// (imposed through J_mn). Points are computed in parallel; output order
/// follows `alphas`.
std::vector<LocusPoint> root_locus(const PlantParams& p, const ObserverConfig& obs, double kp,
                                   double kd, std::span<const double> alphas,
                                   PositionIntegrator integrator = PositionIntegrator::BackwardEuler);

}  // namespace dob
