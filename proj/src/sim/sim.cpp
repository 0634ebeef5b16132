#include "dob/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dob/error.hpp"
#include "dob/observer.hpp"

namespace dob {

std::string_view to_string(ControlMode m) {
  return m == ControlMode::Position ? "position" : "force";
}

std::string_view to_string(Identification i) {
  return i == Identification::Exact ? "exact" : "zero";
}

std::optional<ControlMode> parse_control_mode(std::string_view s) {
  if (s == "position") return ControlMode::Position;
  if (s == "force") return ControlMode::Force;
  return std::nullopt;
}

std::optional<Identification> parse_identification(std::string_view s) {
  if (s == "exact") return Identification::Exact;
  if (s == "zero") return Identification::Zero;
  return std::nullopt;
}

ObserverKind SimConfig::rfob_kind() const { return force_observer_kind.value_or(observer.kind); }

void SimConfig::validate() const {
  plant.validate();
  observer.validate();
  noise.validate();
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidParam, msg); };
  if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration must be positive");
  if (duration < plant.sample_time) bad("duration shorter than one sample");
  if (substeps < 1) bad("substeps must be >= 1");
  if (!std::isfinite(kp) || !std::isfinite(kd) || !std::isfinite(force_gain))
    bad("controller gains must be finite");
  if (mode == ControlMode::Force) {
    if (!environment) bad("force control needs an environment");
    if (!observer.force_bandwidth) bad("force control needs g_rtob");
    if (rfob_kind() == ObserverKind::None) bad("reaction-force observer kind cannot be none");
    if (!(environment->stiffness >= 0.0) || !(environment->damping >= 0.0))
      bad("environment stiffness and damping must be >= 0");
  } else if (environment) {
    bad("position control does not take an environment");
  }
}

namespace {

struct State {
  double q = 0.0;
  double qdot = 0.0;
};

// Result of integrating the plant over one sample with the current held.
struct Interval {
  State next;
  double env_mean = 0.0;  // mean contact torque over the interval
  double env_work = 0.0;  // integral of tau_env * qdot
};

class Plant {
 public:
  explicit Plant(const SimConfig& cfg)
      : cfg_(cfg),
        ts_(cfg.plant.sample_time),
        exact_(!cfg.environment && (!cfg.disturbance.active() || cfg.disturbance.held)) {}

  Interval step(const State& s, double current, double t) const {
    if (exact_) {
      // Constant acceleration over the interval: exact zero-order-hold solution.
      const double a = (cfg_.plant.torque_constant * current - cfg_.disturbance.value(t)) / cfg_.plant.inertia;
      return {{s.q + s.qdot * ts_ + 0.5 * a * ts_ * ts_, s.qdot + a * ts_}, 0.0, 0.0};
    }
    const double h = ts_ / cfg_.substeps;
    const double held_dist = cfg_.disturbance.value(t);
    auto env = [&](double q, double qd) { return cfg_.environment ? cfg_.environment->torque(q, qd) : 0.0; };
    auto dist = [&](double tt) { return cfg_.disturbance.held ? held_dist : cfg_.disturbance.value(tt); };
    auto accel = [&](double tt, double q, double qd, double& e) {
      e = env(q, qd);
      return (cfg_.plant.torque_constant * current - dist(tt) - e) / cfg_.plant.inertia;
    };
    Interval out{s, 0.0, 0.0};
    double q = s.q, qd = s.qdot;
    for (int i = 0; i < cfg_.substeps; ++i) {
      const double tt = t + i * h;
      double e1, e2, e3, e4;
      const double k1v = qd, k1a = accel(tt, q, qd, e1);
      const double k2v = qd + 0.5 * h * k1a, k2a = accel(tt + 0.5 * h, q + 0.5 * h * k1v, k2v, e2);
      const double k3v = qd + 0.5 * h * k2a, k3a = accel(tt + 0.5 * h, q + 0.5 * h * k2v, k3v, e3);
      const double k4v = qd + h * k3a, k4a = accel(tt + h, q + h * k3v, k4v, e4);
      out.env_mean += (e1 + 2.0 * e2 + 2.0 * e3 + e4) / 6.0 / cfg_.substeps;
      out.env_work += h * (e1 * k1v + 2.0 * e2 * k2v + 2.0 * e3 * k3v + e4 * k4v) / 6.0;
      q += h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
      qd += h * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0;
    }
    out.next = {q, qd};
    return out;
  }

 private:
  const SimConfig& cfg_;
  double ts_;
  bool exact_;
};

bool finite_bounded(double v) { return std::isfinite(v) && std::abs(v) <= kDivergenceBound; }

// Everything the controller produces for one candidate motor torque.
struct ControlOutput {
  double torque = 0.0;  // F(u): the torque the law asks for given u
  double desired = 0.0; // J_mn qdd_des
  double dis_hat = 0.0;
  double ext_hat = 0.0;
  double id = 0.0;      // identified internal disturbance fed to the force observer
};

class Controller {
 public:
  explicit Controller(const SimConfig& cfg)
      : cfg_(cfg),
        dob_(cfg.observer.kind, cfg.observer.bandwidth, cfg.plant),
        rfob_(cfg.mode == ControlMode::Force ? cfg.rfob_kind() : ObserverKind::None,
              cfg.observer.force_bandwidth.value_or(1.0), cfg.plant) {}

  bool needs_current_interval() const {
    return dob_.kind() == ObserverKind::Acceleration || rfob_.kind() == ObserverKind::Acceleration;
  }

  // Inputs that are fixed for the sample.
  struct Sample {
    double t = 0.0;
    double q = 0.0;            // measured
    double vel = 0.0;          // measured
    double acc = 0.0;          // measured interval-mean acceleration (accelerometer)
    double true_acc = 0.0;     // matched true mean acceleration for identification
    double env_mean = 0.0;     // matched mean contact torque for identification
  };

  ControlOutput evaluate(const Sample& s, double torque) const {
    const double jn = cfg_.plant.nominal_inertia;
    const double current = torque / cfg_.plant.nominal_torque_constant;
    ControlOutput out;
    double qdd_des = 0.0;
    if (cfg_.mode == ControlMode::Force) {
      if (cfg_.identification == Identification::Exact)
        out.id = torque - jn * s.true_acc - s.env_mean;
      out.ext_hat = rfob_.estimate(current, motion(rfob_.kind(), s), out.id);
      qdd_des = cfg_.force_gain * (cfg_.reference.value(s.t) - out.ext_hat);
    } else {
      qdd_des = cfg_.kp * (cfg_.reference.value(s.t) - s.q) + cfg_.kd * (cfg_.reference.rate(s.t) - s.vel);
      if (cfg_.accel_feedforward) qdd_des += cfg_.reference.acceleration(s.t);
    }
    out.desired = jn * qdd_des;
    out.dis_hat = dob_.estimate(current, motion(dob_.kind(), s));
    out.torque = out.desired + out.dis_hat;
    return out;
  }

  // The law is affine in the torque: u = F(u) solved from two evaluations.
  double solve(const Sample& s) const {
    const double f0 = evaluate(s, 0.0).torque;
    const double f1 = evaluate(s, 1.0).torque;
    const double denom = 1.0 - (f1 - f0);
    if (std::abs(denom) < 1e-14) throw Error(ErrorCode::InvalidParam, "controller loop is singular");
    return f0 / denom;
  }

  void commit(const Sample& s, double torque, double id) {
    const double current = torque / cfg_.plant.nominal_torque_constant;
    dob_.update(current, motion(dob_.kind(), s));
    if (rfob_.kind() != ObserverKind::None) rfob_.update(current, motion(rfob_.kind(), s), id);
  }

 private:
  static double motion(ObserverKind kind, const Sample& s) {
    return kind == ObserverKind::Acceleration ? s.acc : s.vel;
  }

  const SimConfig& cfg_;
  DisturbanceObserver dob_;
  DisturbanceObserver rfob_;
};

void push_row(SimTrace& tr, double t, const State& x, double qdd, double current, double current_des,
              double current_dis, double dis_hat, double ext_hat, double env, double vel, double acc,
              double work) {
  tr.t.push_back(t);
  tr.q.push_back(x.q);
  tr.qdot.push_back(x.qdot);
  tr.qddot.push_back(qdd);
  tr.current.push_back(current);
  tr.current_des.push_back(current_des);
  tr.current_dis.push_back(current_dis);
  tr.tau_dis_hat.push_back(dis_hat);
  tr.tau_ext_hat.push_back(ext_hat);
  tr.tau_env.push_back(env);
  tr.meas_vel.push_back(vel);
  tr.meas_acc.push_back(acc);
  tr.env_work.push_back(work);
}

SimTrace run(const SimConfig& cfg) {
  cfg.validate();
  const double ts = cfg.plant.sample_time;
  const double ktn = cfg.plant.nominal_torque_constant;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / ts));

  Plant plant(cfg);
  Controller ctrl(cfg);
  NoiseSource rng(cfg.seed);
  EncoderState encoder;

  SimTrace tr;
  for (auto* col : {&tr.t, &tr.q, &tr.qdot, &tr.qddot, &tr.current, &tr.current_des, &tr.current_dis,
                    &tr.tau_dis_hat, &tr.tau_ext_hat, &tr.tau_env, &tr.meas_vel, &tr.meas_acc, &tr.env_work})
    col->reserve(steps);

  State x;
  double prev_acc = 0.0;   // true mean acceleration of the previous interval
  double prev_env = 0.0;   // mean contact torque of the previous interval
  double prev_vel = 0.0;   // previous measured velocity
  double work = 0.0;
  const bool now = ctrl.needs_current_interval();

  auto diverge = [&](std::size_t k) {
    tr.status = SimStatus::Diverged;
    tr.diverged_index = k;
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * ts;
    if (!finite_bounded(x.q) || !finite_bounded(x.qdot)) {
      diverge(k);
      break;
    }
    const MeasuredMotion m = measure_motion(cfg.noise.velocity, x.q, x.qdot, ts, encoder, rng);
    const double acc_noise = measure_acceleration(cfg.noise.acceleration, 0.0, rng) +
                             cfg.noise.acceleration_injection.value(t);

    Controller::Sample s;
    s.t = t;
    s.q = m.position;
    s.vel = m.velocity + cfg.noise.velocity_injection.value(t);

    double torque = 0.0;
    Interval iv;
    if (now) {
      // The accelerometer reads the mean acceleration of the interval the
      // current is about to drive: solve I = F(I) / K_taun by secant.
      auto fill = [&](double current) {
        iv = plant.step(x, current, t);
        const double a = (iv.next.qdot - x.qdot) / ts;
        s.acc = a + acc_noise;
        s.true_acc = a;
        s.env_mean = iv.env_mean;
        if (cfg.rfob_kind() == ObserverKind::Velocity) {
          s.true_acc = prev_acc;
          s.env_mean = prev_env;
        }
      };
      auto residual = [&](double current) {
        fill(current);
        return ctrl.solve(s) / ktn - current;
      };
      double i0 = 0.0, i1 = 1.0;
      double r0 = residual(i0), r1 = residual(i1);
      for (int it = 0; it < 60 && std::isfinite(r1); ++it) {
        if (std::abs(r1) <= 1e-13 * (1.0 + std::abs(i1)) || r1 == r0) break;
        const double i2 = i1 - r1 * (i1 - i0) / (r1 - r0);
        i0 = i1;
        r0 = r1;
        i1 = i2;
        r1 = residual(i1);
      }
      fill(i1);
      torque = ctrl.solve(s);
    } else {
      s.acc = (s.vel - prev_vel) / ts + acc_noise;
      s.true_acc = prev_acc;
      s.env_mean = prev_env;
      torque = ctrl.solve(s);
    }
    const double current = torque / ktn;
    if (!finite_bounded(current)) {
      diverge(k);
      break;
    }
    if (!now) iv = plant.step(x, current, t);

    const ControlOutput out = ctrl.evaluate(s, torque);
    ctrl.commit(s, torque, out.id);

    const double a = (iv.next.qdot - x.qdot) / ts;
    const double env = cfg.environment ? cfg.environment->torque(x.q, x.qdot) : 0.0;
    push_row(tr, t, x, a, current, out.desired / ktn, out.dis_hat / ktn, out.dis_hat, out.ext_hat, env,
             s.vel, s.acc, work);

    work += iv.env_work;
    prev_acc = a;
    prev_env = iv.env_mean;
    prev_vel = s.vel;
    x = iv.next;
  }
  return tr;
}

}  // namespace

SimTrace simulate_position(const SimConfig& cfg) {
  if (cfg.mode != ControlMode::Position) throw Error(ErrorCode::InvalidParam, "not a position scenario");
  return run(cfg);
}

SimTrace simulate_force(const SimConfig& cfg) {
  if (cfg.mode != ControlMode::Force) throw Error(ErrorCode::InvalidParam, "not a force scenario");
  return run(cfg);
}

SimTrace simulate(const SimConfig& cfg) { return run(cfg); }

void write_csv(std::ostream& os, const SimTrace& tr) {
  os << kTraceHeader << '\n';
  char buf[32];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double row[] = {tr.t[i], tr.q[i], tr.qdot[i], tr.qddot[i], tr.current[i], tr.current_des[i],
                          tr.current_dis[i], tr.tau_dis_hat[i], tr.tau_ext_hat[i], tr.tau_env[i],
                          tr.meas_vel[i], tr.meas_acc[i]};
    for (std::size_t c = 0; c < std::size(row); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      if (c) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

std::vector<double> tracking_error(const SimConfig& cfg, const SimTrace& tr) {
  std::vector<double> e(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double r = cfg.reference.value(tr.t[i]);
    e[i] = cfg.mode == ControlMode::Force ? r - tr.tau_env[i] : r - tr.q[i];
  }
  return e;
}

std::vector<double> excursion(const SimConfig& cfg, const SimTrace& tr) {
  if (cfg.mode == ControlMode::Position) return tracking_error(cfg, tr);
  std::vector<double> e(tr.size());
  const Environment& env = *cfg.environment;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double target = env.stiffness > 0.0
                              ? env.contact_position + cfg.reference.value(tr.t[i]) / env.stiffness
                              : env.contact_position;
    e[i] = target - tr.q[i];
  }
  return e;
}

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

SimSummary summarize(const SimConfig& cfg, const SimTrace& tr) {
  SimSummary out;
  out.diverged = tr.status == SimStatus::Diverged;
  if (tr.diverged_index) out.diverged_time = static_cast<double>(*tr.diverged_index) * cfg.plant.sample_time;
  out.rms_current = rms(tr.current);
  if (tr.size() == 0) return out;

  const auto err = tracking_error(cfg, tr);
  const std::size_t tail = std::max<std::size_t>(1, tr.size() / 10);
  const std::size_t first = tr.size() - tail;
  double sum = 0.0, worst = 0.0;
  for (std::size_t i = first; i < tr.size(); ++i) {
    sum += std::abs(err[i]);
    worst = std::max(worst, std::abs(err[i]));
  }
  out.steady_state_error = sum / static_cast<double>(tail);

  double scale = std::abs(cfg.reference.value(tr.t.back()));
  if (scale == 0.0)
    for (double e : err) scale = std::max(scale, std::abs(e));
  out.settled = !out.diverged && worst <= 0.05 * scale;
  out.growing = amplitude_growing(excursion(cfg, tr));
  return out;
}

std::size_t longest_alternating_run(std::span<const double> v) {
  std::size_t best = v.empty() ? 0 : (v[0] != 0.0 ? 1 : 0);
  std::size_t run = best;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] == 0.0) {
      run = 0;
    } else if (run > 0 && (v[i] > 0.0) != (v[i - 1] > 0.0)) {
      ++run;
    } else {
      run = 1;
    }
    best = std::max(best, run);
  }
  return best;
}

bool amplitude_growing(std::span<const double> v, std::size_t windows) {
  if (windows < 2 || v.size() < windows) return false;
  const std::size_t len = v.size() / windows;
  std::vector<double> peaks;
  for (std::size_t w = 0; w < windows; ++w) {
    double p = 0.0;
    for (std::size_t i = w * len; i < (w + 1) * len; ++i) p = std::max(p, std::abs(v[i]));
    peaks.push_back(p);
  }
  for (std::size_t w = 1; w < windows; ++w)
    if (!(peaks[w] > peaks[w - 1])) return false;
  return peaks.back() >= 2.0 * peaks.front();
}

}  // namespace dob
