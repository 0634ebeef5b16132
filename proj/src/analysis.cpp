#include "dob/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "dob/error.hpp"

namespace dob {

namespace {

constexpr double kPi = std::numbers::pi;

// Angles in [0, pi] where S has a zero on the unit circle.
std::vector<double> circle_zero_angles(const Rational& s) {
  std::vector<double> out;
  for (const auto& z : s.zeros())
    if (std::abs(std::abs(z) - 1.0) < 1e-6) out.push_back(std::abs(std::arg(z)));
  std::sort(out.begin(), out.end());
  return out;
}

// Midpoint rule over [a, b] with `cells` uniform cells.
template <typename F>
double midpoint(F&& f, double a, double b, std::size_t cells) {
  const double h = (b - a) / static_cast<double>(cells);
  double acc = 0.0;
  for (std::size_t i = 0; i < cells; ++i) acc += f(a + (static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

// Integral over [a, b] with a log singularity at `a` (toward_a) or `b`.
// Geometric cells of ratio 1/2 shrink toward the singular end; each cell is
// split into `per_cell` uniform midpoint cells.
template <typename F>
double graded(F&& f, double a, double b, bool toward_a, std::size_t levels, std::size_t per_cell,
              std::size_t& used) {
  double acc = 0.0;
  const double len = b - a;
  for (std::size_t j = 0; j <= levels; ++j) {
    const double outer = std::ldexp(len, -static_cast<int>(j));
    const double inner = j == levels ? 0.0 : std::ldexp(len, -static_cast<int>(j + 1));
    const double lo = toward_a ? a + inner : b - outer;
    const double hi = toward_a ? a + outer : b - inner;
    acc += midpoint(f, lo, hi, per_cell);
    used += per_cell;
  }
  return acc;
}

}  // namespace

void ConstraintSpec::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(gamma_s) || !open_unit(gamma_t))
    throw Error(ErrorCode::InvalidParam, "gamma_S and gamma_T must lie in (0, 1)");
}

BodeReport bode_integral(const Rational& sensitivity, const Rational& open_loop,
                         std::size_t intervals) {
  if (classify(sensitivity) != Stability::Stable)
    throw Error(ErrorCode::UnstableSensitivity, "S has poles on or outside the unit circle");
  intervals = std::max(intervals, kMinBodeIntervals);

  BodeReport rep;
  rep.analytic_rhs = -2.0 * kPi * std::log(std::abs(1.0 + open_loop.high_frequency_gain()));

  auto integrand = [&](double theta) { return std::log(std::abs(freqresp(sensitivity, theta))); };

  // Segments of [0, pi] between singular angles; each gets a share of the grid.
  std::vector<double> breaks{0.0};
  std::vector<double> singular = circle_zero_angles(sensitivity);
  for (double s : singular)
    if (s > 1e-12 && s < kPi - 1e-12) breaks.push_back(s);
  breaks.push_back(kPi);
  auto is_singular = [&](double x) {
    return std::any_of(singular.begin(), singular.end(),
                       [&](double s) { return std::abs(s - x) <= 1e-12; });
  };

  constexpr std::size_t levels = 40;
  std::size_t pieces = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    pieces += (is_singular(breaks[i]) && is_singular(breaks[i + 1])) ? 2 : 1;
  const std::size_t budget = (intervals + pieces - 1) / pieces;
  const std::size_t per_cell = (budget + levels) / (levels + 1);

  double half = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    const bool sa = is_singular(a);
    const bool sb = is_singular(b);
    if (sa && sb) {
      const double m = 0.5 * (a + b);
      half += graded(integrand, a, m, true, levels, per_cell, used);
      half += graded(integrand, m, b, false, levels, per_cell, used);
    } else if (sa || sb) {
      half += graded(integrand, a, b, sa, levels, per_cell, used);
    } else {
      half += midpoint(integrand, a, b, budget);
      used += budget;
    }
  }
  // Real coefficients: |S| is even in theta.
  rep.numeric_integral = 2.0 * half;
  rep.grid_points = 2 * used;
  rep.abs_error = std::abs(rep.numeric_integral - rep.analytic_rhs);
  return rep;
}

Peak peak_gain(const Rational& r, std::size_t grid) {
  for (const auto& p : r.poles())
    if (std::abs(std::abs(p) - 1.0) <= kUnitCircleBand)
      throw Error(ErrorCode::PoleOnCircle, "pole on the unit circle; peak gain is unbounded");
  grid = std::max<std::size_t>(grid, 4096);

  auto mag = [&](double theta) { return std::abs(freqresp(r, theta)); };
  Peak best{0.0, mag(0.0)};
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < grid; ++i) {
    const double theta = kPi * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double m = mag(theta);
    if (m > best.magnitude) {
      best = {theta, m};
      best_i = i;
    }
  }

  // Golden-section on the bracket around the best grid point.
  const double step = kPi / static_cast<double>(grid - 1);
  double lo = std::max(0.0, step * (static_cast<double>(best_i) - 1.0));
  double hi = std::min(kPi, step * (static_cast<double>(best_i) + 1.0));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = mag(x1);
  double f2 = mag(x2);
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = mag(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = mag(x1);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = mag(x);
  if (fx > best.magnitude) best = {x, fx};
  return best;
}

double constraint_max_k(const ConstraintSpec& c) {
  c.validate();
  return std::min(2.0 * (1.0 - c.gamma_s), 2.0 / (1.0 + c.gamma_t));
}

BandwidthLimits max_bandwidth(const PlantParams& p, const ConstraintSpec& c) {
  p.validate();
  const double scale = p.alpha() * p.sample_time;
  return {constraint_max_k(c) / scale, 1.0 / scale, 2.0 / scale};
}

const char* to_string(Response r) {
  switch (r) {
    case Response::Monotone: return "monotone";
    case Response::Oscillatory: return "oscillatory";
    case Response::Marginal: return "marginal";
    case Response::Unstable: return "unstable";
  }
  return "unknown";
}

Response classify_k(double k, ObserverKind kind) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidParam, "k must be positive");
  if (kind != ObserverKind::Velocity) return Response::Monotone;
  if (std::abs(k - 2.0) <= 1e-12) return Response::Marginal;
  if (k <= 1.0) return Response::Monotone;
  if (k < 2.0) return Response::Oscillatory;
  return Response::Unstable;
}

std::vector<LocusPoint> root_locus(const PlantParams& p, const ObserverConfig& obs, double kp,
                                   double kd, std::span<const double> alphas,
                                   PositionIntegrator integrator) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw Error(ErrorCode::InvalidParam, "alpha values must be positive");
    if (i > 0 && alphas[i] < alphas[i - 1]) throw Error(ErrorCode::InvalidParam, "alpha values must be sorted");
  }

  auto solve = [&](double alpha) {
    LocusPoint pt;
    pt.alpha = alpha;
    pt.roots = roots(position_charpoly(p.with_alpha(alpha), obs, kp, kd, integrator));
    auto key = [](const Complex& z) { return std::round(std::abs(z) * 1e12); };
    std::sort(pt.roots.begin(), pt.roots.end(), [&](const Complex& a, const Complex& b) {
      if (key(a) != key(b)) return key(a) > key(b);
      return std::arg(a) < std::arg(b);
    });
    pt.spectral_radius = spectral_radius(pt.roots);
    return pt;
  };

  std::vector<LocusPoint> out(alphas.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(alphas.size(), 1));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < alphas.size(); i += workers) out[i] = solve(alphas[i]);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace dob
