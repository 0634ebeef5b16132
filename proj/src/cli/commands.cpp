#include "dob/commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "dob/analysis.hpp"
#include "dob/error.hpp"

namespace dob::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = hi;
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return ConfigError;
  switch (err->code()) {
    case ErrorCode::Config:
    case ErrorCode::InvalidParam:
      return ConfigError;
    default:
      return AnalysisError;
  }
}

int freq(const SimConfig& cfg, const FreqOptions& opt, std::ostream& data) {
  cfg.plant.validate();
  cfg.observer.validate();
  if (opt.points == 0) throw Error(ErrorCode::Config, "--points must be >= 1");
  const LoopSet loop = build_loop(cfg.plant, cfg.observer);
  const double pi = std::numbers::pi;
  const auto thetas = log_grid(1e-4 * pi, pi * (1.0 - 1e-9), opt.points);
  const auto s = freqresp(loop.sensitivity, thetas);
  const auto t = freqresp(loop.complementary, thetas);
  const auto n = freqresp(loop.noise, thetas);
  data << "theta_rad,omega_rad_s,mag_S,phase_S_rad,mag_T,phase_T_rad,mag_N\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    data << num(thetas[i]) << ',' << num(thetas[i] / cfg.plant.sample_time) << ',' << num(std::abs(s[i]))
         << ',' << num(std::arg(s[i])) << ',' << num(std::abs(t[i])) << ',' << num(std::arg(t[i])) << ','
         << num(std::abs(n[i])) << '\n';
  }
  return Ok;
}

int constraints(const SimConfig& cfg, const ConstraintOptions& opt, std::ostream& report) {
  const ConstraintSpec spec{opt.gamma_s, opt.gamma_t};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("--gamma-s/--gamma-t: ") + e.what());
  }
  cfg.plant.validate();
  cfg.observer.validate();
  const double k = cfg.observer.kind == ObserverKind::None
                       ? 0.0
                       : cfg.plant.alpha() * cfg.observer.bandwidth * cfg.plant.sample_time;
  const double inf = std::numeric_limits<double>::infinity();
  const bool velocity = cfg.observer.kind == ObserverKind::Velocity;
  const BandwidthLimits lim =
      velocity ? max_bandwidth(cfg.plant, spec) : BandwidthLimits{inf, inf, inf};

  report << "observer " << to_string(cfg.observer.kind) << '\n'
         << "k_max " << num(velocity ? constraint_max_k(spec) : inf) << '\n'
         << "g_max " << num(lim.g_max) << '\n'
         << "g_osc " << num(lim.g_osc) << '\n'
         << "g_unstable " << num(lim.g_unstable) << '\n'
         << "k " << num(k) << '\n';

  bool s_ok = true, t_ok = true;
  std::string note;
  if (cfg.observer.kind != ObserverKind::None) {
    const Response r = classify_k(k, cfg.observer.kind);
    if (r != Response::Monotone) note = to_string(r);
    if (r == Response::Unstable || r == Response::Marginal) {
      s_ok = t_ok = false;
    } else {
      const LoopSet loop = build_loop(cfg.plant, cfg.observer);
      const double ps = peak_gain(loop.sensitivity).magnitude;
      const double pt = peak_gain(loop.complementary).magnitude;
      // Small slack so that a bandwidth exactly at g_max passes.
      s_ok = ps <= (1.0 / spec.gamma_s) * (1.0 + 1e-9);
      t_ok = pt <= (1.0 / spec.gamma_t) * (1.0 + 1e-9);
      report << "peak_S " << num(ps) << '\n' << "peak_T " << num(pt) << '\n';
    }
  }
  report << "S constraint (|S| <= 1/gamma_s = " << num(1.0 / spec.gamma_s) << "): " << (s_ok ? "PASS" : "FAIL")
         << '\n'
         << "T constraint (|T| <= 1/gamma_t = " << num(1.0 / spec.gamma_t) << "): " << (t_ok ? "PASS" : "FAIL")
         << '\n';
  if (!note.empty()) report << "note: " << note << " response (k = " << num(k) << ")\n";
  return s_ok && t_ok ? Ok : Fail;
}

int bode(const SimConfig& cfg, std::ostream& report) {
  cfg.plant.validate();
  cfg.observer.validate();
  const LoopSet loop = build_loop(cfg.plant, cfg.observer);
  const BodeReport r = bode_integral(loop.sensitivity, loop.open_loop);
  report << "numeric " << num(r.numeric_integral) << '\n'
         << "analytic " << num(r.analytic_rhs) << '\n'
         << "abs_error " << num(r.abs_error) << '\n'
         << "grid_points " << r.grid_points << '\n';
  return r.abs_error <= 1e-2 ? Ok : Fail;
}

int rootlocus(const SimConfig& cfg, const RootLocusOptions& opt, std::ostream& data) {
  if (!(opt.alpha_from > 0.0) || !(opt.alpha_to >= opt.alpha_from) || !std::isfinite(opt.alpha_to))
    throw Error(ErrorCode::Config, "--alpha-from/--alpha-to: need 0 < A <= B");
  if (opt.steps < 1) throw Error(ErrorCode::Config, "--steps must be >= 1");
  const auto alphas = log_grid(opt.alpha_from, opt.alpha_to, opt.steps);
  const auto points = root_locus(cfg.plant, cfg.observer, cfg.kp, cfg.kd, alphas, opt.integrator);
  data << "alpha,root_index,re,im,magnitude,spectral_radius\n";
  for (const LocusPoint& p : points)
    for (std::size_t i = 0; i < p.roots.size(); ++i)
      data << num(p.alpha) << ',' << i << ',' << num(p.roots[i].real()) << ',' << num(p.roots[i].imag()) << ','
           << num(std::abs(p.roots[i])) << ',' << num(p.spectral_radius) << '\n';
  return Ok;
}

int sim(const SimConfig& cfg, std::ostream& data, std::ostream& report) {
  const SimTrace trace = simulate(cfg);
  write_csv(data, trace);
  const SimSummary s = summarize(cfg, trace);
  if (s.diverged) {
    report << "status=diverged t_diverged=" << num(s.diverged_time) << '\n';
    return Diverged;
  }
  report << "status=" << (s.settled ? "settled" : "unsettled") << " steady_state_error=" << num(s.steady_state_error)
         << " rms_I=" << num(s.rms_current) << (s.growing ? " growing=true" : "") << '\n';
  return s.settled ? Ok : Fail;
}

}  // namespace dob::cli
