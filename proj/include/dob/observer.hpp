#pragma once

#include "dob/models.hpp"

namespace dob {

/// Backward-Euler low-pass  y_k = (y_{k-1} + g T x_k) / (1 + g T).
class QFilter {
 public:
  QFilter(double bandwidth, double sample_time);

  double peek(double input) const { return (state_ + gt_ * input) / (1.0 + gt_); }
  double update(double input) { return state_ = peek(input); }
  double state() const { return state_; }

 private:
  double gt_;
  double state_ = 0.0;
};

/// One disturbance observer (also used as the reaction-force observer).
///
/// `motion` is the measured velocity for the velocity kind and the measured
/// acceleration for the acceleration kind. `offset` is subtracted from the
/// lumped torque before filtering (the identified internal disturbance when
/// the observer is used to estimate external torque).
///
///   velocity:      Q (K_taun I - offset + J_mn g qdot) - J_mn g qdot
///   acceleration:  Q (K_taun I - offset - J_mn qdd)
///
/// The velocity form never differentiates qdot explicitly; with zero initial
/// state it is identical to Q applied to K_taun I - offset - J_mn (z-1)/(T z) qdot.
class DisturbanceObserver {
 public:
  DisturbanceObserver(ObserverKind kind, double bandwidth, const PlantParams& plant);

  ObserverKind kind() const { return kind_; }

  /// Estimate for this sample without advancing the filter.
  double estimate(double current, double motion, double offset = 0.0) const;
  /// Advance one sample and return the estimate.
  double update(double current, double motion, double offset = 0.0);

 private:
  double filter_input(double current, double motion, double offset) const;
  double feedthrough(double motion) const;

  ObserverKind kind_;
  double nominal_inertia_;
  double nominal_torque_constant_;
  double bandwidth_;
  QFilter filter_;
};

}  // namespace dob
