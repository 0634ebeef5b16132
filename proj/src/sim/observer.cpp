#include "dob/observer.hpp"

#include "dob/error.hpp"

namespace dob {

QFilter::QFilter(double bandwidth, double sample_time) : gt_(bandwidth * sample_time) {
  if (!(bandwidth > 0.0) || !(sample_time > 0.0))
    throw Error(ErrorCode::InvalidParam, "Q-filter bandwidth and sample time must be positive");
}

DisturbanceObserver::DisturbanceObserver(ObserverKind kind, double bandwidth, const PlantParams& plant)
    : kind_(kind),
      nominal_inertia_(plant.nominal_inertia),
      nominal_torque_constant_(plant.nominal_torque_constant),
      bandwidth_(bandwidth),
      // An absent observer still owns a (never used) filter.
      filter_(kind == ObserverKind::None ? 1.0 : bandwidth, plant.sample_time) {
  plant.validate();
}

double DisturbanceObserver::filter_input(double current, double motion, double offset) const {
  const double torque = nominal_torque_constant_ * current - offset;
  if (kind_ == ObserverKind::Velocity) return torque + nominal_inertia_ * bandwidth_ * motion;
  return torque - nominal_inertia_ * motion;
}

double DisturbanceObserver::feedthrough(double motion) const {
  return kind_ == ObserverKind::Velocity ? nominal_inertia_ * bandwidth_ * motion : 0.0;
}

double DisturbanceObserver::estimate(double current, double motion, double offset) const {
  if (kind_ == ObserverKind::None) return 0.0;
  return filter_.peek(filter_input(current, motion, offset)) - feedthrough(motion);
}

double DisturbanceObserver::update(double current, double motion, double offset) {
  if (kind_ == ObserverKind::None) return 0.0;
  return filter_.update(filter_input(current, motion, offset)) - feedthrough(motion);
}

}  // namespace dob
